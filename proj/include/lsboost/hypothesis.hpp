#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace lsboost {

struct ConstantHypothesis {
  double value = 0.0;
  bool operator==(const ConstantHypothesis&) const = default;
};

struct AffineHypothesis {
  double intercept = 0.0;
  std::vector<double> weights;
  bool operator==(const AffineHypothesis&) const = default;
};

// Internal nodes send x to `left` when x[feature] <= threshold. A node with
// feature < 0 is a leaf carrying `value`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct TreeHypothesis {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  bool operator==(const TreeHypothesis&) const = default;
};

/// A real-valued function of a feature row: constant, affine, or an
/// axis-aligned regression tree.
class WeakHypothesis {
 public:
  using Body = std::variant<ConstantHypothesis, AffineHypothesis, TreeHypothesis>;

  WeakHypothesis() : body_(ConstantHypothesis{}) {}
  WeakHypothesis(Body body);  // validates structure; throws DataError

  static WeakHypothesis constant(double c) { return WeakHypothesis(ConstantHypothesis{c}); }

  double operator()(std::span<const double> x) const noexcept;

  const Body& body() const noexcept { return body_; }

  /// Smallest feature dimension this hypothesis can be evaluated on.
  std::size_t required_dims() const noexcept;
  int depth() const noexcept;

  /// shift + scale * h, in the same class (affine closure).
  WeakHypothesis affine_transform(double scale, double shift) const;

  bool operator==(const WeakHypothesis&) const = default;

 private:
  Body body_;
};

}  // namespace lsboost
