#include "lsboost/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "lsboost/error.hpp"
#include "lsboost/metrics.hpp"

namespace lsboost {
namespace {

// ceil(ratio), tolerating representation error such as 2/0.002 = 1000.0000000000001.
int ceil_ratio(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio) || ratio > 1e8)
    throw UsageError("2B/alpha must be a positive real below 1e8");
  return static_cast<int>(std::ceil(ratio * (1.0 - 1e-9)));
}

struct RoundStep {
  std::map<int, WeakHypothesis> fits;
  std::vector<int> next_levels;
  std::vector<double> unrounded;
  int oracle_calls = 0;
};

// One LSBoost update from the current level assignment. Oracle calls on distinct
// level sets run concurrently; every output slot is written by exactly one
// iteration, so results do not depend on scheduling.
RoundStep run_round(const Dataset& data, const Grid& grid, std::span<const int> levels,
                    const OracleSpec& oracle, std::size_t min_level_size, int threads) {
  const auto parts = partition_levels(levels, grid.levels());
  const std::size_t min_size = std::max<std::size_t>(1, min_level_size);
  std::vector<int> eligible;
  for (int l = 0; l < grid.levels(); ++l)
    if (parts[l].size() >= min_size) eligible.push_back(l);

  std::vector<std::optional<WeakHypothesis>> fitted(eligible.size());
  std::vector<std::string> errors(eligible.size());
  const auto jobs = static_cast<std::ptrdiff_t>(eligible.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t j = 0; j < jobs; ++j) {
    try {
      fitted[j] = fit(oracle, data, parts[eligible[j]]);
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  }
  for (std::size_t j = 0; j < eligible.size(); ++j) {
    if (!errors[j].empty())
      throw OracleError("oracle failed on level " + std::to_string(eligible[j]) + " (v=" +
                        std::to_string(grid.value(eligible[j])) + "): " + errors[j]);
  }

  RoundStep step;
  step.oracle_calls = static_cast<int>(eligible.size());
  std::vector<const WeakHypothesis*> by_level(static_cast<std::size_t>(grid.levels()), nullptr);
  for (std::size_t j = 0; j < eligible.size(); ++j) {
    auto [it, inserted] = step.fits.emplace(eligible[j], std::move(*fitted[j]));
    by_level[eligible[j]] = &it->second;
  }

  const auto n = static_cast<std::ptrdiff_t>(data.size());
  step.next_levels.resize(data.size());
  step.unrounded.resize(data.size());
  bool bad = false;
#pragma omp parallel for schedule(static) num_threads(threads) reduction(|| : bad)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const int level = levels[i];
    if (const WeakHypothesis* h = by_level[level]) {
      const double raw = (*h)(data.row(i));
      step.unrounded[i] = raw;
      if (std::isfinite(raw)) {
        step.next_levels[i] = grid.index_of(raw);
      } else {
        bad = true;
        step.next_levels[i] = level;
      }
    } else {
      step.unrounded[i] = grid.value(level);
      step.next_levels[i] = level;
    }
  }
  if (bad) throw OracleError("oracle returned a hypothesis with non-finite output");
  return step;
}

int count_nonempty(std::span<const int> levels, int level_count) {
  std::vector<char> seen(static_cast<std::size_t>(level_count), 0);
  int count = 0;
  for (int l : levels) {
    if (!seen[l]) {
      seen[l] = 1;
      ++count;
    }
  }
  return count;
}

}  // namespace

ResolvedConfig resolve(const TrainConfig& config) {
  const double B = config.bound_B;
  if (!(B > 0.0) || !std::isfinite(B)) throw UsageError("bound B must be a positive finite real");
  if (config.alpha && !(*config.alpha > 0.0 && *config.alpha < 1.0))
    throw UsageError("alpha must lie in (0,1)");
  if (config.levels_m && *config.levels_m < 1) throw UsageError("levels m must be a positive integer");
  if (config.thread_count < 1) throw UsageError("thread count must be >= 1");
  config.oracle.validate();

  ResolvedConfig out;
  out.bound_B = B;
  if (config.alpha && config.levels_m) {
    const double ratio = 2.0 * B / *config.alpha;
    const int m = *config.levels_m;
    if (std::abs(m - ratio) > 1e-9 * m)
      throw UsageError("levels m=" + std::to_string(m) + " is inconsistent with 2B/alpha=" +
                       std::to_string(ratio));
    out.grid = Grid(m);
    out.alpha = 2.0 * B / m;
  } else if (config.levels_m) {
    out.grid = Grid(*config.levels_m);
    out.alpha = 2.0 * B / *config.levels_m;
  } else if (config.alpha) {
    out.grid = Grid(ceil_ratio(2.0 * B / *config.alpha));
    out.alpha = *config.alpha;
  } else {
    throw UsageError("either alpha or levels m must be given");
  }
  out.threshold = out.alpha / (2.0 * B);
  if (config.max_rounds) {
    if (*config.max_rounds < 1) throw UsageError("max_rounds must be positive");
    out.max_rounds = *config.max_rounds;
    out.default_cap = false;
  } else {
    out.max_rounds = ceil_ratio(2.0 * B / out.alpha) + 1;
    out.default_cap = true;
  }
  return out;
}

std::string to_string(HaltReason reason) {
  return reason == HaltReason::Converged ? "converged" : "round_cap";
}

std::vector<RoundRecord> TrainReport::retained() const {
  std::vector<RoundRecord> out;
  for (const auto& r : records)
    if (r.retained) out.push_back(r);
  return out;
}

double level_mse(std::span<const int> levels, const Grid& grid, std::span<const double> labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double r = grid.value(levels[i]) - labels[i];
    s += r * r;
  }
  return s / static_cast<double>(levels.size());
}

TrainResult train(const Dataset& data, const TrainConfig& config,
                  const std::optional<WeakHypothesis>& initial, const RoundObserver& observer) {
  const ResolvedConfig rc = resolve(config);
  const Grid& grid = rc.grid;
  const auto labels = data.labels();

  double label_sum = 0.0;
  for (double y : labels) label_sum += y;
  const WeakHypothesis init =
      initial.value_or(WeakHypothesis::constant(label_sum / static_cast<double>(data.size())));
  if (init.required_dims() > data.dims()) throw DataError("initial hypothesis needs more features than the data has");

  std::vector<int> levels(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) levels[i] = grid.index_of(init(data.row(i)));

  TrainReport report;
  report.alpha = rc.alpha;
  report.bound_B = rc.bound_B;
  report.threshold = rc.threshold;
  {
    RoundRecord r0;
    r0.mse = level_mse(levels, grid, labels);
    r0.msce = calibration_report(levels, grid, labels).k2;
    r0.nonempty_levels = count_nonempty(levels, grid.levels());
    report.records.push_back(r0);
  }

  std::vector<LevelRound> rounds;
  double err_prev = std::numeric_limits<double>::infinity();
  double err_cur = report.records.front().mse;
  int t = 0;
  bool converged = true;
  std::vector<double> rounded;
  while (err_prev - err_cur >= rc.threshold) {
    if (t >= rc.max_rounds) {
      if (rc.default_cap)
        throw OracleError("exceeded the round bound " + std::to_string(rc.max_rounds) +
                          "; the oracle is not a squared-error minimizer over an affine-closed class");
      converged = false;
      break;
    }
    const auto started = std::chrono::steady_clock::now();
    RoundStep step = run_round(data, grid, levels, config.oracle, config.min_level_size, config.thread_count);
    const double millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

    RoundRecord rec;
    rec.round = t + 1;
    rec.mse = level_mse(step.next_levels, grid, labels);
    rec.msce = calibration_report(step.next_levels, grid, labels).k2;
    rec.nonempty_levels = count_nonempty(step.next_levels, grid.levels());
    rec.oracle_calls = step.oracle_calls;
    rec.millis = millis;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double a = grid.value(step.next_levels[i]) - labels[i];
      const double b = step.unrounded[i] - labels[i];
      rec.max_rounding_penalty = std::max(rec.max_rounding_penalty, a * a - b * b);
    }
    if (observer) {
      rounded.resize(data.size());
      for (std::size_t i = 0; i < data.size(); ++i) rounded[i] = grid.value(step.next_levels[i]);
      observer(RoundTrace{rec.round, step.unrounded, rounded});
    }
    report.records.push_back(rec);
    rounds.emplace_back(grid, std::move(step.fits));
    levels = std::move(step.next_levels);
    err_prev = err_cur;
    err_cur = rec.mse;
    ++t;
  }

  report.rounds_executed = t;
  if (converged) {
    // The last round fell short of the threshold; output f_{t-1}.
    report.halt = HaltReason::Converged;
    report.records.back().retained = false;
    rounds.pop_back();
  } else {
    report.halt = HaltReason::RoundCap;
  }
  return {LevelSetModel(grid, data.dims(), init, std::move(rounds)), std::move(report)};
}

double probe_round(const LevelSetModel& model, const Dataset& data, const TrainConfig& config) {
  if (config.thread_count < 1) throw UsageError("thread count must be >= 1");
  config.oracle.validate();
  const auto levels = predict_levels(model, data);
  const double before = level_mse(levels, model.grid(), data.labels());
  const RoundStep step =
      run_round(data, model.grid(), levels, config.oracle, config.min_level_size, config.thread_count);
  return before - level_mse(step.next_levels, model.grid(), data.labels());
}

}  // namespace lsboost
