#include "lsboost/dataset.hpp"

#include <cmath>
#include <string>

#include "lsboost/error.hpp"

namespace lsboost {

Dataset::Dataset(std::vector<double> features, std::vector<double> labels, std::size_t dims)
    : features_(std::move(features)), labels_(std::move(labels)), dims_(dims) {
  if (labels_.empty()) throw DataError("dataset has no rows");
  if (dims_ == 0) throw DataError("dataset has no feature columns");
  if (features_.size() != labels_.size() * dims_)
    throw DataError("feature matrix size " + std::to_string(features_.size()) + " != " +
                    std::to_string(labels_.size()) + " rows x " + std::to_string(dims_) + " dims");
  for (std::size_t k = 0; k < features_.size(); ++k) {
    if (!std::isfinite(features_[k]))
      throw DataError("non-finite feature at row " + std::to_string(k / dims_) + ", column " +
                      std::to_string(k % dims_));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const double y = labels_[i];
    if (!(y >= 0.0 && y <= 1.0))
      throw DataError("label at row " + std::to_string(i) + " is outside [0,1]");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<double> f;
  std::vector<double> y;
  f.reserve(rows.size() * dims_);
  y.reserve(rows.size());
  for (std::size_t r : rows) {
    const auto x = row(r);
    f.insert(f.end(), x.begin(), x.end());
    y.push_back(labels_[r]);
  }
  return Dataset(std::move(f), std::move(y), dims_);
}

Grid::Grid(int m) : m_(m) {
  if (m < 1) throw UsageError("grid size m must be positive, got " + std::to_string(m));
}

int Grid::index_of(double v) const {
  if (!std::isfinite(v)) throw DataError("cannot round a non-finite value to the grid");
  if (v <= 0.0) return 0;
  if (v >= 1.0) return m_;
  int k = static_cast<int>(std::floor(v * m_));
  if (k >= m_) k = m_ - 1;
  // v*m can land one cell off when v sits near a grid value.
  while (k > 0 && value(k) > v) --k;
  while (k + 1 < m_ && value(k + 1) <= v) ++k;
  const double below = v - value(k);
  const double above = value(k + 1) - v;
  return above < below ? k + 1 : k;
}

}  // namespace lsboost
