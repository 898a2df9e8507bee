#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lsboost {

/// Immutable table of n feature rows (d finite reals each) and n labels in [0,1].
/// Features are stored row-major.
class Dataset {
 public:
  /// Throws DataError if n == 0, d == 0, sizes disagree, any value is
  /// non-finite, or any label lies outside [0,1].
  Dataset(std::vector<double> features, std::vector<double> labels, std::size_t dims);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dims() const noexcept { return dims_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {features_.data() + i * dims_, dims_};
  }
  double label(std::size_t i) const noexcept { return labels_[i]; }
  double feature(std::size_t i, std::size_t j) const noexcept { return features_[i * dims_ + j]; }

  std::span<const double> labels() const noexcept { return labels_; }
  std::span<const double> features() const noexcept { return features_; }

  /// Copy of the rows listed in `rows`, in that order.
  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<double> features_;
  std::vector<double> labels_;
  std::size_t dims_;
};

/// The discretized range {0, 1/m, ..., 1}. Level index i maps to value i/m.
class Grid {
 public:
  explicit Grid(int m);

  int m() const noexcept { return m_; }
  int levels() const noexcept { return m_ + 1; }
  double value(int index) const noexcept { return static_cast<double>(index) / m_; }

  /// Index of the nearest grid value; exact midpoints go to the smaller value.
  /// Values outside [0,1] clamp to the end points. Throws DataError on NaN/inf.
  int index_of(double v) const;
  double round(double v) const { return value(index_of(v)); }

  bool operator==(const Grid&) const = default;

 private:
  int m_;
};

inline double round_to_grid(double v, const Grid& grid) { return grid.round(v); }

}  // namespace lsboost
