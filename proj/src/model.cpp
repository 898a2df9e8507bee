#include "lsboost/model.hpp"

#include <string>

#include "lsboost/error.hpp"

namespace lsboost {

LevelRound::LevelRound(const Grid& grid, std::map<int, WeakHypothesis> by_level)
    : slot_(static_cast<std::size_t>(grid.levels()), -1) {
  entries_.reserve(by_level.size());
  for (auto& [level, h] : by_level) {
    if (level < 0 || level > grid.m())
      throw DataError("round level index " + std::to_string(level) + " outside 0.." + std::to_string(grid.m()));
    slot_[level] = static_cast<int>(entries_.size());
    entries_.emplace_back(level, std::move(h));
  }
}

LevelSetModel::LevelSetModel(Grid grid, std::size_t dims, WeakHypothesis initial,
                             std::vector<LevelRound> rounds)
    : grid_(grid), dims_(dims), initial_(std::move(initial)), rounds_(std::move(rounds)) {
  if (dims_ == 0) throw DataError("model feature dimension must be positive");
  auto check = [this](const WeakHypothesis& h) {
    if (h.required_dims() > dims_)
      throw DataError("hypothesis needs " + std::to_string(h.required_dims()) +
                      " features but the model has " + std::to_string(dims_));
  };
  check(initial_);
  for (const auto& r : rounds_) {
    for (const auto& [level, h] : r.entries()) {
      if (level > grid_.m()) throw DataError("round level index outside the grid");
      check(h);
    }
  }
}

int LevelSetModel::predict_level_unchecked(std::span<const double> x,
                                           std::size_t round_count) const {
  int level = grid_.index_of(initial_(x));
  for (std::size_t t = 0; t < round_count; ++t) {
    if (const WeakHypothesis* h = rounds_[t].find(level)) level = grid_.index_of((*h)(x));
  }
  return level;
}

int LevelSetModel::predict_level(std::span<const double> x) const {
  return predict_level(x, rounds_.size());
}

int LevelSetModel::predict_level(std::span<const double> x, std::size_t round_count) const {
  if (x.size() != dims_)
    throw DataError("feature row has " + std::to_string(x.size()) + " values, model expects " +
                    std::to_string(dims_));
  if (round_count > rounds_.size()) round_count = rounds_.size();
  return predict_level_unchecked(x, round_count);
}

LevelSetModel LevelSetModel::prefix(std::size_t round_count) const {
  if (round_count > rounds_.size()) round_count = rounds_.size();
  return LevelSetModel(grid_, dims_, initial_,
                       std::vector<LevelRound>(rounds_.begin(), rounds_.begin() + round_count));
}

std::vector<int> predict_levels(const LevelSetModel& model, const Dataset& data) {
  if (data.dims() != model.dims())
    throw DataError("dataset has " + std::to_string(data.dims()) + " features, model expects " +
                    std::to_string(model.dims()));
  const auto n = static_cast<std::ptrdiff_t>(data.size());
  std::vector<int> levels(data.size());
  bool failed = false;
#pragma omp parallel for schedule(static) reduction(|| : failed)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      levels[i] = model.predict_level(data.row(i));
    } catch (const Error&) {
      failed = true;
    }
  }
  if (failed) throw DataError("model produced a non-finite value on some row");
  return levels;
}

std::vector<double> predict_all(const LevelSetModel& model, const Dataset& data) {
  const auto levels = predict_levels(model, data);
  std::vector<double> out(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) out[i] = model.grid().value(levels[i]);
  return out;
}

std::vector<std::vector<std::size_t>> partition_levels(std::span<const int> levels, int level_count) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(level_count), 0);
  for (int l : levels) ++counts[l];
  std::vector<std::vector<std::size_t>> parts(static_cast<std::size_t>(level_count));
  for (int l = 0; l < level_count; ++l) parts[l].reserve(counts[l]);
  for (std::size_t i = 0; i < levels.size(); ++i) parts[levels[i]].push_back(i);
  return parts;
}

std::vector<std::vector<std::size_t>> partition_by_level(const LevelSetModel& model,
                                                        const Dataset& data) {
  const auto levels = predict_levels(model, data);
  return partition_levels(levels, model.grid().levels());
}

}  // namespace lsboost
