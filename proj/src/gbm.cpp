#include "lsboost/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lsboost/error.hpp"
#include "lsboost/metrics.hpp"

namespace lsboost {

GBModel::GBModel(double base, double learning_rate, bool clip, std::vector<WeakHypothesis> stages)
    : base_(base), learning_rate_(learning_rate), clip_(clip), stages_(std::move(stages)) {}

double GBModel::raw(std::span<const double> x, std::size_t stage_count) const noexcept {
  stage_count = std::min(stage_count, stages_.size());
  double f = base_;
  for (std::size_t t = 0; t < stage_count; ++t) f += learning_rate_ * stages_[t](x);
  return f;
}

double GBModel::predict(std::span<const double> x, std::size_t stage_count) const noexcept {
  const double f = raw(x, stage_count);
  return clip_ ? std::clamp(f, 0.0, 1.0) : f;
}

std::vector<double> gb_predict_all(const GBModel& model, const Dataset& data) {
  std::vector<double> out(data.size());
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = model.predict(data.row(i));
  return out;
}

GBResult gb_train(const Dataset& data, const GBConfig& config) {
  if (config.rounds < 1) throw UsageError("gradient boosting needs at least one round");
  if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0))
    throw UsageError("learning rate must lie in (0,1]");
  config.oracle.validate();
  const Grid grid(config.calibration_m);
  const auto labels = data.labels();
  const std::size_t n = data.size();

  const double base = std::accumulate(labels.begin(), labels.end(), 0.0) / static_cast<double>(n);
  GBResult result{GBModel(base, config.learning_rate, config.clip_predictions), {}};

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<double> raw(n, base);
  std::vector<double> shown(n);
  std::vector<double> residual(n);

  auto record = [&](int round) {
    for (std::size_t i = 0; i < n; ++i) shown[i] = config.clip_predictions ? std::clamp(raw[i], 0.0, 1.0) : raw[i];
    result.records.push_back({round, mse(shown, labels), binned_calibration(shown, labels, grid).k2});
  };
  record(0);

  for (int t = 1; t <= config.rounds; ++t) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = labels[i] - raw[i];
    WeakHypothesis h = residual_fit(config.oracle, data, all, residual);
    for (std::size_t i = 0; i < n; ++i) raw[i] += config.learning_rate * h(data.row(i));
    result.model.add_stage(std::move(h));
    record(t);
  }
  return result;
}

}  // namespace lsboost
