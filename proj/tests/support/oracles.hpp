#pragma once

// Independent test oracles. Nothing here calls into the code paths it checks.

#include <cstdint>
#include <random>
#include <vector>

#include "lsboost/dataset.hpp"

namespace oracles {

struct BruteSplit {
  double sse = 0.0;  // minimum over the constant fit and all single splits
  int feature = -1;  // -1 when no split beats the constant
  double threshold = 0.0;
};

/// Enumerates every (feature, midpoint) split and evaluates its SSE with two
/// direct passes. `x` is row-major n x d.
BruteSplit brute_force_stump(const std::vector<double>& x, std::size_t d, const std::vector<double>& t);

/// Direct evaluation of sum_v Pr[f=v] * E[h(y-v) | f=v]^2 (and the l1 / max forms)
/// from per-row predicted values, grouping by exact value equality.
struct DirectCalibration {
  double k2 = 0.0;
  double k1 = 0.0;
  double kinf = 0.0;
};
DirectCalibration direct_calibration(const std::vector<double>& f, const std::vector<double>& y,
                                     const std::vector<double>& h);

/// Uniform random dataset: features in [lo, hi], labels uniform in [0,1].
lsboost::Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d, double lo = -1.0,
                                double hi = 1.0);

}  // namespace oracles
