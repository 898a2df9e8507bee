#pragma once

#include <span>
#include <vector>

#include "lsboost/dataset.hpp"
#include "lsboost/hypothesis.hpp"
#include "lsboost/oracle.hpp"

namespace lsboost {

struct GBConfig {
  OracleSpec oracle;
  int rounds = 100;
  double learning_rate = 0.1;
  bool clip_predictions = true;
  int calibration_m = 100;  // grid used to bin predictions for MSCE
};

/// F(x) = base + learning_rate * sum_t h_t(x), optionally clamped to [0,1].
class GBModel {
 public:
  GBModel(double base, double learning_rate, bool clip, std::vector<WeakHypothesis> stages = {});

  double predict(std::span<const double> x) const noexcept { return predict(x, stages_.size()); }
  double predict(std::span<const double> x, std::size_t stage_count) const noexcept;
  double raw(std::span<const double> x, std::size_t stage_count) const noexcept;

  const std::vector<WeakHypothesis>& stages() const noexcept { return stages_; }
  double base() const noexcept { return base_; }
  double learning_rate() const noexcept { return learning_rate_; }
  void add_stage(WeakHypothesis h) { stages_.push_back(std::move(h)); }

 private:
  double base_;
  double learning_rate_;
  bool clip_;
  std::vector<WeakHypothesis> stages_;
};

struct GBRoundRecord {
  int round = 0;
  double mse = 0.0;
  double msce = 0.0;
};

struct GBResult {
  GBModel model;
  std::vector<GBRoundRecord> records;  // records[0] describes F_0
};

GBResult gb_train(const Dataset& data, const GBConfig& config);

std::vector<double> gb_predict_all(const GBModel& model, const Dataset& data);

}  // namespace lsboost
