#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace lsboost::reference {

int nearest_level(double v, int m) {
  int best = 0;
  double best_dist = std::abs(v - 0.0);
  for (int i = 1; i <= m; ++i) {
    const double d = std::abs(v - static_cast<double>(i) / m);
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

namespace {

int level_of(const LevelSetModel& model, std::span<const double> x) {
  const int m = model.grid().m();
  int level = nearest_level(model.initial()(x), m);
  for (const auto& round : model.rounds()) {
    for (const auto& [l, h] : round.entries()) {
      if (l == level) {
        level = nearest_level(h(x), m);
        break;
      }
    }
  }
  return level;
}

double error_of(const LevelSetModel& model, const Dataset& data) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = model.grid().value(level_of(model, data.row(i))) - data.label(i);
    s += r * r;
  }
  return s / static_cast<double>(data.size());
}

}  // namespace

std::vector<double> predict_all(const LevelSetModel& model, const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out.push_back(model.grid().value(level_of(model, data.row(i))));
  return out;
}

ReferenceResult train(const Dataset& data, const TrainConfig& config) {
  const ResolvedConfig rc = resolve(config);
  double mean = 0.0;
  for (double y : data.labels()) mean += y;
  mean /= static_cast<double>(data.size());

  LevelSetModel model(rc.grid, data.dims(), WeakHypothesis::constant(mean));
  std::vector<double> errors{error_of(model, data)};
  std::vector<LevelSetModel> history{model};
  double prev = std::numeric_limits<double>::infinity();
  const std::size_t min_size = std::max<std::size_t>(1, config.min_level_size);
  bool capped = false;
  while (prev - errors.back() >= rc.threshold) {
    if (static_cast<int>(model.rounds().size()) >= rc.max_rounds) {
      capped = true;
      break;
    }
    std::map<int, std::vector<std::size_t>> level_sets;
    for (std::size_t i = 0; i < data.size(); ++i) level_sets[level_of(model, data.row(i))].push_back(i);
    std::map<int, WeakHypothesis> fits;
    for (const auto& [level, rows] : level_sets)
      if (rows.size() >= min_size) fits.emplace(level, fit(config.oracle, data, rows));
    model.append_round(LevelRound(rc.grid, std::move(fits)));
    history.push_back(model);
    prev = errors.back();
    errors.push_back(error_of(model, data));
  }
  LevelSetModel output = capped ? history.back() : history[history.size() - 2];
  return {std::move(output), std::move(errors)};
}

}  // namespace lsboost::reference
