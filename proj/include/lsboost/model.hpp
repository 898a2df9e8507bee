#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "lsboost/dataset.hpp"
#include "lsboost/hypothesis.hpp"

namespace lsboost {

/// One boosting round: a partial map from level index to hypothesis. Levels
/// without an entry keep their value.
class LevelRound {
 public:
  LevelRound() = default;
  LevelRound(const Grid& grid, std::map<int, WeakHypothesis> by_level);

  const WeakHypothesis* find(int level) const noexcept {
    const int slot = (level >= 0 && static_cast<std::size_t>(level) < slot_.size()) ? slot_[level] : -1;
    return slot < 0 ? nullptr : &entries_[slot].second;
  }

  /// (level, hypothesis) pairs in increasing level order.
  const std::vector<std::pair<int, WeakHypothesis>>& entries() const noexcept { return entries_; }

  bool operator==(const LevelRound& o) const { return entries_ == o.entries_; }

 private:
  std::vector<std::pair<int, WeakHypothesis>> entries_;
  std::vector<int> slot_;
};

/// Initial predictor plus a sequence of rounds; every prediction lies on the grid.
class LevelSetModel {
 public:
  LevelSetModel(Grid grid, std::size_t dims, WeakHypothesis initial,
                std::vector<LevelRound> rounds = {});

  const Grid& grid() const noexcept { return grid_; }
  std::size_t dims() const noexcept { return dims_; }
  const WeakHypothesis& initial() const noexcept { return initial_; }
  const std::vector<LevelRound>& rounds() const noexcept { return rounds_; }

  /// Level index reached after applying the first `round_count` rounds
  /// (all rounds by default). Throws DataError on dimension mismatch.
  int predict_level(std::span<const double> x) const;
  int predict_level(std::span<const double> x, std::size_t round_count) const;
  double predict(std::span<const double> x) const { return grid_.value(predict_level(x)); }

  /// Model truncated to its first `round_count` rounds.
  LevelSetModel prefix(std::size_t round_count) const;

  void append_round(LevelRound round) { rounds_.push_back(std::move(round)); }

  bool operator==(const LevelSetModel&) const = default;

 private:
  int predict_level_unchecked(std::span<const double> x, std::size_t round_count) const;

  Grid grid_;
  std::size_t dims_;
  WeakHypothesis initial_;
  std::vector<LevelRound> rounds_;
};

/// Predictions for every row; rows are evaluated in parallel.
std::vector<double> predict_all(const LevelSetModel& model, const Dataset& data);
std::vector<int> predict_levels(const LevelSetModel& model, const Dataset& data);

/// result[level] lists the rows (ascending) whose prediction is grid.value(level).
/// The result has grid.levels() entries, empty for unoccupied levels.
std::vector<std::vector<std::size_t>> partition_by_level(const LevelSetModel& model,
                                                        const Dataset& data);
std::vector<std::vector<std::size_t>> partition_levels(std::span<const int> levels, int level_count);

}  // namespace lsboost
