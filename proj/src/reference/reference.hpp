#pragma once

// Serial, straightforward transcription of level-set boosting. It re-evaluates
// the whole model every round and rounds by linear scan; it exists so tests
// and benchmarks can compare the parallel kernels against it.

#include <vector>

#include "lsboost/dataset.hpp"
#include "lsboost/model.hpp"
#include "lsboost/train.hpp"

namespace lsboost::reference {

/// Nearest grid value by scanning all m+1 candidates; ties keep the first (smaller).
int nearest_level(double v, int m);

std::vector<double> predict_all(const LevelSetModel& model, const Dataset& data);

struct ReferenceResult {
  LevelSetModel model;
  std::vector<double> errors;  // err_0, err_1, ... for every executed round
};

ReferenceResult train(const Dataset& data, const TrainConfig& config);

}  // namespace lsboost::reference
