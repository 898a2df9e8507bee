#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsboost/dataset.hpp"
#include "lsboost/model.hpp"
#include "lsboost/oracle.hpp"

namespace lsboost {

struct TrainConfig {
  std::optional<double> alpha;   // target multicalibration error, in (0,1)
  double bound_B = 1.0;          // bound on max h(x)^2 for the audited class
  std::optional<int> levels_m;   // grid size override
  OracleSpec oracle;
  std::size_t min_level_size = 1;
  std::optional<int> max_rounds;
  int thread_count = 1;
};

/// TrainConfig with grid size and alpha reconciled.
struct ResolvedConfig {
  Grid grid{1};
  double alpha = 0.0;
  double bound_B = 1.0;
  double threshold = 0.0;  // alpha / (2B); rounds continue while improvement >= threshold
  int max_rounds = 0;
  bool default_cap = true;
};

/// m = ceil(2B/alpha) when only alpha is given; alpha = 2B/m when only m is
/// given; both must agree otherwise. Throws UsageError.
ResolvedConfig resolve(const TrainConfig& config);

enum class HaltReason { Converged, RoundCap };
std::string to_string(HaltReason reason);

struct RoundRecord {
  int round = 0;
  double mse = 0.0;
  double msce = 0.0;
  int nonempty_levels = 0;
  int oracle_calls = 0;
  double millis = 0.0;
  // max over rows of (f_t(x)-y)^2 - (f~_t(x)-y)^2; 0 for the initial model
  double max_rounding_penalty = 0.0;
  bool retained = true;  // false for the final round whose improvement fell short
};

struct TrainReport {
  std::vector<RoundRecord> records;  // records[0] describes f_0
  HaltReason halt = HaltReason::Converged;
  int rounds_executed = 0;
  double alpha = 0.0;
  double bound_B = 1.0;
  double threshold = 0.0;

  std::vector<RoundRecord> retained() const;
};

/// Per-round view handed to a training observer. `unrounded` holds f~_t and
/// `rounded` holds f_t, both indexed by row.
struct RoundTrace {
  int round = 0;
  std::span<const double> unrounded;
  std::span<const double> rounded;
};
using RoundObserver = std::function<void(const RoundTrace&)>;

struct TrainResult {
  LevelSetModel model;
  TrainReport report;
};

/// Level-set boosting. Each round fits the oracle on every sufficiently large
/// level set of the current model (in parallel across level sets), substitutes
/// the fits, rounds to the grid, and stops once the squared-error improvement
/// drops below alpha/(2B). Returns the model from before that final round.
///
/// The result is bit-identical for every thread_count.
TrainResult train(const Dataset& data, const TrainConfig& config,
                  const std::optional<WeakHypothesis>& initial = std::nullopt,
                  const RoundObserver& observer = nullptr);

/// err(model) - err(model after one more hypothetical round). Does not modify the model.
double probe_round(const LevelSetModel& model, const Dataset& data, const TrainConfig& config);

/// Mean squared error of grid predictions given as level indices.
double level_mse(std::span<const int> levels, const Grid& grid, std::span<const double> labels);

}  // namespace lsboost
