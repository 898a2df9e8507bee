#include "lsboost/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lsboost/error.hpp"

namespace lsboost {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DataError(std::string("non-finite ") + what + " in hypothesis");
}

// Every node must be reachable exactly once from the root, children after parents.
void validate_tree(const TreeHypothesis& tree) {
  const auto& nodes = tree.nodes;
  if (nodes.empty()) throw DataError("tree hypothesis has no nodes");
  std::vector<int> parents(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) {
      check_finite(n.value, "leaf value");
      continue;
    }
    check_finite(n.threshold, "threshold");
    const auto size = static_cast<int>(nodes.size());
    for (int child : {n.left, n.right}) {
      if (child <= static_cast<int>(i) || child >= size)
        throw DataError("tree node " + std::to_string(i) + " has an invalid child index");
      ++parents[child];
    }
  }
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (parents[i] != 1) throw DataError("tree node " + std::to_string(i) + " is not reachable exactly once");
}

int tree_depth(const std::vector<TreeNode>& nodes, int at) {
  const TreeNode& n = nodes[at];
  if (n.is_leaf()) return 0;
  return 1 + std::max(tree_depth(nodes, n.left), tree_depth(nodes, n.right));
}

}  // namespace

WeakHypothesis::WeakHypothesis(Body body) : body_(std::move(body)) {
  std::visit(Overloaded{
                 [](const ConstantHypothesis& c) { check_finite(c.value, "constant"); },
                 [](const AffineHypothesis& a) {
                   check_finite(a.intercept, "intercept");
                   for (double w : a.weights) check_finite(w, "weight");
                 },
                 [](const TreeHypothesis& t) { validate_tree(t); },
             },
             body_);
}

double WeakHypothesis::operator()(std::span<const double> x) const noexcept {
  return std::visit(Overloaded{
                        [](const ConstantHypothesis& c) { return c.value; },
                        [&x](const AffineHypothesis& a) {
                          double s = a.intercept;
                          for (std::size_t j = 0; j < a.weights.size(); ++j) s += a.weights[j] * x[j];
                          return s;
                        },
                        [&x](const TreeHypothesis& t) {
                          const TreeNode* n = &t.nodes[0];
                          while (!n->is_leaf())
                            n = &t.nodes[x[n->feature] <= n->threshold ? n->left : n->right];
                          return n->value;
                        },
                    },
                    body_);
}

std::size_t WeakHypothesis::required_dims() const noexcept {
  return std::visit(Overloaded{
                        [](const ConstantHypothesis&) -> std::size_t { return 0; },
                        [](const AffineHypothesis& a) -> std::size_t { return a.weights.size(); },
                        [](const TreeHypothesis& t) -> std::size_t {
                          std::size_t d = 0;
                          for (const auto& n : t.nodes)
                            if (!n.is_leaf()) d = std::max(d, static_cast<std::size_t>(n.feature) + 1);
                          return d;
                        },
                    },
                    body_);
}

int WeakHypothesis::depth() const noexcept {
  if (const auto* t = std::get_if<TreeHypothesis>(&body_)) return tree_depth(t->nodes, 0);
  return 0;
}

WeakHypothesis WeakHypothesis::affine_transform(double scale, double shift) const {
  return std::visit(Overloaded{
                        [&](const ConstantHypothesis& c) {
                          return WeakHypothesis(ConstantHypothesis{shift + scale * c.value});
                        },
                        [&](const AffineHypothesis& a) {
                          AffineHypothesis out{shift + scale * a.intercept, a.weights};
                          for (double& w : out.weights) w *= scale;
                          return WeakHypothesis(std::move(out));
                        },
                        [&](const TreeHypothesis& t) {
                          TreeHypothesis out = t;
                          for (auto& n : out.nodes)
                            if (n.is_leaf()) n.value = shift + scale * n.value;
                          return WeakHypothesis(std::move(out));
                        },
                    },
                    body_);
}

}  // namespace lsboost
