#include "lsboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lsboost/error.hpp"

namespace lsboost {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DataError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                    std::to_string(b) + ")");
  if (a == 0) throw DataError(std::string(what) + ": empty input");
}

// residual(i) is the per-row quantity whose conditional mean is taken on each level.
template <class Residual>
CalibrationReport aggregate(std::span<const int> levels, const Grid& grid, Residual residual) {
  const auto count_levels = static_cast<std::size_t>(grid.levels());
  std::vector<std::size_t> counts(count_levels, 0);
  std::vector<double> sums(count_levels, 0.0);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    ++counts[levels[i]];
    sums[levels[i]] += residual(i);
  }
  CalibrationReport rep;
  rep.m = grid.m();
  const auto n = static_cast<double>(levels.size());
  for (int l = 0; l < grid.levels(); ++l) {
    if (counts[l] == 0) continue;
    LevelCalibration lc;
    lc.level = l;
    lc.value = grid.value(l);
    lc.mass = static_cast<double>(counts[l]) / n;
    lc.violation = sums[l] / static_cast<double>(counts[l]);
    const double weighted = lc.mass * std::abs(lc.violation);
    rep.k2 += lc.mass * lc.violation * lc.violation;
    rep.k1 += weighted;
    rep.kinf = std::max(rep.kinf, weighted);
    rep.levels.push_back(lc);
  }
  return rep;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> tabulate(const WeakHypothesis& h, const Dataset& data) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = h(data.row(i));
  return out;
}

double mean_sq_error_of_fit(const WeakHypothesis& h, const Dataset& data, std::span<const std::size_t> rows) {
  double s = 0.0;
  for (std::size_t r : rows) {
    const double e = h(data.row(r)) - data.label(r);
    s += e * e;
  }
  return s / static_cast<double>(rows.size());
}

// Mean of (y - f*(x))^2 where f* is the per-distinct-feature-row label mean.
double empirical_bayes_error(const Dataset& data, std::span<const std::size_t> subset) {
  std::vector<std::size_t> order(subset.begin(), subset.end());
  auto row_less = [&](std::size_t a, std::size_t b) {
    const auto ra = data.row(a);
    const auto rb = data.row(b);
    if (std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end())) return true;
    if (std::lexicographical_compare(rb.begin(), rb.end(), ra.begin(), ra.end())) return false;
    return a < b;
  };
  std::sort(order.begin(), order.end(), row_less);
  double total = 0.0;
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    const auto first = data.row(order[start]);
    while (end < order.size() && std::ranges::equal(data.row(order[end]), first)) ++end;
    const double anchor = data.label(order[start]);
    double offset = 0.0;
    for (std::size_t k = start; k < end; ++k) offset += data.label(order[k]) - anchor;
    const double mean = anchor + offset / static_cast<double>(end - start);
    for (std::size_t k = start; k < end; ++k) {
      const double e = data.label(order[k]) - mean;
      total += e * e;
    }
    start = end;
  }
  return total / static_cast<double>(order.size());
}

}  // namespace

double mse(std::span<const double> predictions, std::span<const double> labels) {
  require_same_length(predictions.size(), labels.size(), "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double r = predictions[i] - labels[i];
    s += r * r;
  }
  return s / static_cast<double>(labels.size());
}

CalibrationReport calibration_report(std::span<const int> levels, const Grid& grid,
                                     std::span<const double> labels, std::span<const double> h) {
  require_same_length(levels.size(), labels.size(), "calibration_report");
  if (h.empty()) return aggregate(levels, grid, [&](std::size_t i) { return labels[i] - grid.value(levels[i]); });
  require_same_length(h.size(), labels.size(), "calibration_report");
  return aggregate(levels, grid, [&](std::size_t i) { return h[i] * (labels[i] - grid.value(levels[i])); });
}

CalibrationReport calibration_error(const LevelSetModel& model, const Dataset& data) {
  const auto levels = predict_levels(model, data);
  return calibration_report(levels, model.grid(), data.labels());
}

CalibrationReport binned_calibration(std::span<const double> predictions, std::span<const double> labels,
                                     const Grid& grid) {
  require_same_length(predictions.size(), labels.size(), "binned_calibration");
  std::vector<int> bins(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) bins[i] = grid.index_of(predictions[i]);
  return aggregate(bins, grid, [&](std::size_t i) { return labels[i] - predictions[i]; });
}

MulticalibrationResult multicalibration_error(const LevelSetModel& model, const Dataset& data,
                                              const std::vector<std::vector<double>>& columns) {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != data.size())
      throw DataError("function " + std::to_string(c) + " has " + std::to_string(columns[c].size()) +
                      " values for " + std::to_string(data.size()) + " rows");
    for (double v : columns[c])
      if (!std::isfinite(v)) throw DataError("function " + std::to_string(c) + " has a non-finite value");
  }
  const auto levels = predict_levels(model, data);
  MulticalibrationResult out;
  double worst = -1.0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.per_function.push_back(calibration_report(levels, model.grid(), data.labels(), columns[c]));
    for (const auto& lc : out.per_function.back().levels) {
      const double w = lc.mass * std::abs(lc.violation);
      if (w > worst) {
        worst = w;
        out.worst_function = c;
        out.worst_level = lc.level;
        out.worst_weighted_violation = w;
      }
    }
  }
  return out;
}

MulticalibrationResult multicalibration_error(const LevelSetModel& model, const Dataset& data,
                                              const std::vector<WeakHypothesis>& functions) {
  std::vector<std::vector<double>> columns;
  columns.reserve(functions.size());
  for (const auto& h : functions) columns.push_back(tabulate(h, data));
  return multicalibration_error(model, data, columns);
}

Improver build_improver(std::span<const double> h_values, std::span<const double> labels, double v) {
  require_same_length(h_values.size(), labels.size(), "build_improver");
  Improver out;
  out.level_value = v;
  double second = 0.0;
  double corr = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    second += h_values[i] * h_values[i];
    corr += h_values[i] * (labels[i] - v);
  }
  const auto n = static_cast<double>(labels.size());
  out.second_moment = second / n;
  out.violation = corr / n;
  if (!(out.second_moment > 0.0)) throw DataError("build_improver: E[h^2] is zero on the level set");
  if (!(out.violation > 0.0)) throw DataError("build_improver: violation E[h(y-v)] is not positive");
  out.eta = out.violation / out.second_moment;
  out.predicted_gain = out.violation * out.violation / out.second_moment;
  return out;
}

ImproverHypothesis build_improver(const WeakHypothesis& h, double v, const Dataset& data) {
  const auto values = tabulate(h, data);
  const Improver imp = build_improver(values, data.labels(), v);
  return {h.affine_transform(imp.eta, v), imp};
}

double realized_improvement(std::span<const double> g_values, std::span<const double> labels, double v) {
  require_same_length(g_values.size(), labels.size(), "realized_improvement");
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double a = v - labels[i];
    const double b = g_values[i] - labels[i];
    s += a * a - b * b;
  }
  return s / static_cast<double>(labels.size());
}

ViolationCertificate violation_from_improvement(std::span<const double> h_values,
                                                std::span<const double> labels) {
  require_same_length(h_values.size(), labels.size(), "violation_from_improvement");
  ViolationCertificate c;
  c.level_mean = mean_of(labels);
  c.improvement = realized_improvement(h_values, labels, c.level_mean);
  double corr = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) corr += h_values[i] * (labels[i] - c.level_mean);
  c.correlation = corr / static_cast<double>(labels.size());
  c.holds = !(c.improvement > 0.0) || c.correlation >= c.improvement / 2.0;
  return c;
}

ViolationCertificate violation_from_improvement(const WeakHypothesis& h, const Dataset& level_data) {
  const auto values = tabulate(h, level_data);
  return violation_from_improvement(values, level_data.labels());
}

WeakLearningAudit check_weak_learning(const Dataset& data, std::span<const std::size_t> subset,
                                      const OracleSpec& oracle, double gamma,
                                      const std::optional<OracleSpec>& comparison) {
  if (subset.empty()) throw DataError("weak-learning audit on an empty subset");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw UsageError("gamma must be a finite non-negative real");
  for (std::size_t r : subset)
    if (r >= data.size()) throw DataError("subset row " + std::to_string(r) + " out of range");

  WeakLearningAudit a;
  a.subset_size = subset.size();
  a.mass = static_cast<double>(subset.size()) / static_cast<double>(data.size());
  a.const_err = mean_sq_error_of_fit(fit(OracleSpec::constant(), data, subset), data, subset);
  a.benchmark_err = comparison ? mean_sq_error_of_fit(fit(*comparison, data, subset), data, subset)
                               : empirical_bayes_error(data, subset);
  a.oracle_err = mean_sq_error_of_fit(fit(oracle, data, subset), data, subset);
  a.premise = a.benchmark_err < a.const_err - gamma;
  a.conclusion = a.oracle_err < a.const_err - gamma;
  return a;
}

}  // namespace lsboost
