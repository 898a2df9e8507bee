#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsboost/dataset.hpp"
#include "lsboost/hypothesis.hpp"
#include "lsboost/model.hpp"
#include "lsboost/oracle.hpp"

namespace lsboost {

double mse(std::span<const double> predictions, std::span<const double> labels);

struct LevelCalibration {
  int level = 0;
  double value = 0.0;
  double mass = 0.0;      // Pr[f = v]
  double violation = 0.0; // E[h(x)(y - v) | f = v]
};

/// Per-level (multi)calibration violations and their l2/l1/l-infinity aggregates:
///   k2   = sum_v Pr[f=v] * E[h(y-v) | f=v]^2   (MSCE when h == 1)
///   k1   = sum_v Pr[f=v] * |E[h(y-v) | f=v]|
///   kinf = max_v Pr[f=v] * |E[h(y-v) | f=v]|
struct CalibrationReport {
  int m = 0;
  std::vector<LevelCalibration> levels;  // non-empty levels only, increasing
  double k2 = 0.0;
  double k1 = 0.0;
  double kinf = 0.0;
};

/// Calibration of grid-valued predictions (given as level indices) weighted by h.
/// `h` may be empty, meaning h == 1.
CalibrationReport calibration_report(std::span<const int> levels, const Grid& grid,
                                     std::span<const double> labels,
                                     std::span<const double> h = {});

CalibrationReport calibration_error(const LevelSetModel& model, const Dataset& data);

/// Continuous predictions binned onto `grid` by nearest value; the per-bin
/// residual is mean(y - prediction). Equals K2 for grid-valued predictions.
CalibrationReport binned_calibration(std::span<const double> predictions,
                                     std::span<const double> labels, const Grid& grid);

struct MulticalibrationResult {
  std::vector<CalibrationReport> per_function;
  // argmax over (function, level) of mass * |violation|
  std::size_t worst_function = 0;
  int worst_level = 0;
  double worst_weighted_violation = 0.0;
};

/// Each entry of `columns` is a tabulated h, one value per data row.
/// Throws DataError on length mismatch or non-finite values.
MulticalibrationResult multicalibration_error(const LevelSetModel& model, const Dataset& data,
                                              const std::vector<std::vector<double>>& columns);
MulticalibrationResult multicalibration_error(const LevelSetModel& model, const Dataset& data,
                                              const std::vector<WeakHypothesis>& functions);

/// h' = v + eta*h with eta = violation / E[h^2] on one level set, and the
/// gain it is guaranteed to achieve over the constant v.
struct Improver {
  double level_value = 0.0;
  double violation = 0.0;      // E[h(y - v)]
  double second_moment = 0.0;  // E[h^2]
  double eta = 0.0;
  double predicted_gain = 0.0; // violation^2 / E[h^2]
};

/// Throws DataError if E[h^2] == 0 or the violation is not positive.
Improver build_improver(std::span<const double> h_values, std::span<const double> labels, double v);

struct ImproverHypothesis {
  WeakHypothesis hypothesis;
  Improver improver;
};
/// Hypothesis form; `data` is the level set of v.
ImproverHypothesis build_improver(const WeakHypothesis& h, double v, const Dataset& data);

/// E[(v - y)^2 - (g(x) - y)^2] on the level set, where g_values holds g(x).
double realized_improvement(std::span<const double> g_values, std::span<const double> labels, double v);

struct ViolationCertificate {
  double level_mean = 0.0;   // ybar_v
  double improvement = 0.0;  // E[(ybar_v - y)^2 - (h - y)^2]
  double correlation = 0.0;  // E[h (y - ybar_v)]
  bool holds = true;         // correlation >= improvement/2 whenever improvement > 0
};

ViolationCertificate violation_from_improvement(std::span<const double> h_values,
                                                std::span<const double> labels);
ViolationCertificate violation_from_improvement(const WeakHypothesis& h, const Dataset& level_data);

struct WeakLearningAudit {
  std::size_t subset_size = 0;
  double mass = 0.0;
  double const_err = 0.0;
  double benchmark_err = 0.0;
  double oracle_err = 0.0;
  bool premise = false;     // benchmark_err < const_err - gamma
  bool conclusion = false;  // oracle_err < const_err - gamma
  bool satisfied() const noexcept { return !premise || conclusion; }
};

/// Empirical weak-learning check on one subset. Without a comparison class the
/// benchmark is the empirical Bayes predictor (per-distinct-row label mean).
WeakLearningAudit check_weak_learning(const Dataset& data, std::span<const std::size_t> subset,
                                      const OracleSpec& oracle, double gamma,
                                      const std::optional<OracleSpec>& comparison = std::nullopt);

}  // namespace lsboost
