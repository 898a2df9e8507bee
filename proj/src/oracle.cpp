#include "lsboost/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lsboost/error.hpp"

namespace lsboost {

OracleSpec OracleSpec::parse(const std::string& text) {
  if (text == "constant") return constant();
  if (text == "linear") return linear();
  if (text == "stump") return stump();
  if (text.rfind("tree:", 0) == 0) {
    const std::string digits = text.substr(5);
    int depth = 0;
    try {
      std::size_t used = 0;
      depth = std::stoi(digits, &used);
      if (used != digits.size()) depth = 0;
    } catch (const std::exception&) {
      depth = 0;
    }
    if (depth < 1) throw UsageError("bad tree depth in learner '" + text + "'");
    return tree(depth);
  }
  throw UsageError("unknown learner '" + text + "' (expected constant|linear|stump|tree:D)");
}

std::string OracleSpec::to_string() const {
  switch (kind) {
    case OracleKind::Constant: return "constant";
    case OracleKind::Linear: return "linear";
    case OracleKind::Stump: return "stump";
    case OracleKind::Tree: return "tree:" + std::to_string(depth);
  }
  return "?";
}

void OracleSpec::validate() const {
  if (kind == OracleKind::Tree && depth < 1) throw UsageError("tree depth must be >= 1");
  if (min_leaf < 1) throw UsageError("min_leaf must be >= 1");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw UsageError("ridge must be a finite non-negative real");
}

namespace {

// Subset view: row ids into the dataset, targets and optional weights parallel to them.
struct Problem {
  const Dataset& data;
  std::span<const std::size_t> rows;
  std::span<const double> targets;
  std::optional<std::span<const double>> weights;

  std::size_t size() const noexcept { return rows.size(); }
  double w(std::size_t i) const noexcept { return weights ? (*weights)[i] : 1.0; }
  double x(std::size_t i, std::size_t j) const noexcept { return data.feature(rows[i], j); }
};

// Anchored at the first target so that equal targets give their value exactly.
template <class Index>
double anchored_mean(const Problem& p, const Index& members) {
  const double anchor = p.targets[*members.begin()];
  double sw = 0.0;
  double swd = 0.0;
  for (auto i : members) {
    sw += p.w(i);
    swd += p.w(i) * (p.targets[i] - anchor);
  }
  return anchor + swd / sw;
}

struct IndexRange {
  std::size_t n;
  struct It {
    std::size_t i;
    std::size_t operator*() const noexcept { return i; }
    It& operator++() noexcept { ++i; return *this; }
    bool operator!=(const It& o) const noexcept { return i != o.i; }
  };
  It begin() const noexcept { return {0}; }
  It end() const noexcept { return {n}; }
};

double weighted_mean(const Problem& p) { return anchored_mean(p, IndexRange{p.size()}); }

WeakHypothesis fit_linear(const Problem& p, double ridge) {
  const std::size_t d = p.data.dims();
  double sw = 0.0;
  const double t_mean = weighted_mean(p);
  std::vector<double> x_mean(d, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double w = p.w(i);
    sw += w;
    for (std::size_t j = 0; j < d; ++j) x_mean[j] += w * p.x(i, j);
  }
  for (double& m : x_mean) m /= sw;

  // Normal equations on centered columns; the intercept is recovered from the means.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  std::vector<double> xc(d);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double w = p.w(i);
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) xc[j] = p.x(i, j) - x_mean[j];
    const double tc = p.targets[i] - t_mean;
    for (std::size_t j = 0; j < d; ++j) {
      rhs(j) += w * xc[j] * tc;
      for (std::size_t k = 0; k <= j; ++k) gram(j, k) += w * xc[j] * xc[k];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    gram(j, j) += ridge;
    for (std::size_t k = 0; k < j; ++k) gram(k, j) = gram(j, k);
  }

  const WeakHypothesis fallback = WeakHypothesis::constant(t_mean);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > std::numeric_limits<double>::epsilon()))
    return fallback;
  const Eigen::VectorXd coef = ldlt.solve(rhs);
  if (!coef.allFinite()) return fallback;

  AffineHypothesis affine{t_mean, std::vector<double>(d)};
  for (std::size_t j = 0; j < d; ++j) {
    affine.weights[j] = coef(static_cast<Eigen::Index>(j));
    affine.intercept -= affine.weights[j] * x_mean[j];
  }
  if (!std::isfinite(affine.intercept)) return fallback;
  return WeakHypothesis(std::move(affine));
}

// Greedy axis-aligned tree. Each node keeps, per feature, its members sorted
// by (feature value, position) so children inherit sorted order by stable partition.
class TreeGrower {
 public:
  TreeGrower(const Problem& p, std::size_t min_leaf) : p_(p), min_leaf_(min_leaf) {}

  TreeHypothesis grow(int max_depth) {
    const std::size_t d = p_.data.dims();
    const auto k = static_cast<std::uint32_t>(p_.size());
    std::vector<std::vector<std::uint32_t>> sorted(d);
    for (std::size_t f = 0; f < d; ++f) {
      auto& order = sorted[f];
      order.resize(k);
      std::iota(order.begin(), order.end(), 0u);
      std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double xa = p_.x(a, f);
        const double xb = p_.x(b, f);
        return xa < xb || (xa == xb && a < b);
      });
    }
    side_.assign(k, 0);
    TreeHypothesis tree;
    build(std::move(sorted), max_depth, tree.nodes);
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  double mean_of(const std::vector<std::uint32_t>& members) const { return anchored_mean(p_, members); }

  // Exhaustive search over midpoints between consecutive distinct values.
  Split best_split(const std::vector<std::vector<std::uint32_t>>& sorted) const {
    const auto& any = sorted.front();
    const std::size_t count = any.size();
    Split best;
    if (count < 2 * min_leaf_) return best;

    const double mu = mean_of(any);
    double total_w = 0.0;
    double sst = 0.0;
    for (std::uint32_t i : any) {
      const double c = p_.targets[i] - mu;
      total_w += p_.w(i);
      sst += p_.w(i) * c * c;
    }
    if (!(sst > 0.0)) return best;
    // Gains below this are float noise, not structure.
    const double min_gain = 1e-13 * sst;

    for (std::size_t f = 0; f < sorted.size(); ++f) {
      const auto& order = sorted[f];
      double wl = 0.0;
      double sl = 0.0;
      for (std::size_t pos = 0; pos + 1 < count; ++pos) {
        const std::uint32_t i = order[pos];
        wl += p_.w(i);
        sl += p_.w(i) * (p_.targets[i] - mu);
        const std::size_t left_count = pos + 1;
        if (left_count < min_leaf_ || count - left_count < min_leaf_) continue;
        const double a = p_.x(i, f);
        const double b = p_.x(order[pos + 1], f);
        if (!(a < b)) continue;
        const double wr = total_w - wl;
        if (!(wl > 0.0) || !(wr > 0.0)) continue;
        // Between-group sum of squares for a two-way split of centered targets.
        const double gain = sl * sl * (1.0 / wl + 1.0 / wr);
        if (gain > best.gain && gain > min_gain) {
          double thr = a + (b - a) / 2.0;
          if (!(thr < b)) thr = a;
          best = {static_cast<int>(f), thr, gain};
        }
      }
    }
    return best;
  }

  int build(std::vector<std::vector<std::uint32_t>> sorted, int depth_left, std::vector<TreeNode>& out) {
    const int id = static_cast<int>(out.size());
    out.push_back({});
    const Split split = depth_left > 0 ? best_split(sorted) : Split{};
    if (split.feature < 0) {
      out[id].value = mean_of(sorted.front());
      return id;
    }
    for (std::uint32_t i : sorted.front())
      side_[i] = p_.x(i, static_cast<std::size_t>(split.feature)) <= split.threshold ? 0 : 1;
    std::vector<std::vector<std::uint32_t>> left(sorted.size());
    std::vector<std::vector<std::uint32_t>> right(sorted.size());
    for (std::size_t f = 0; f < sorted.size(); ++f) {
      for (std::uint32_t i : sorted[f]) (side_[i] == 0 ? left[f] : right[f]).push_back(i);
    }
    sorted.clear();
    sorted.shrink_to_fit();
    out[id].feature = split.feature;
    out[id].threshold = split.threshold;
    const int l = build(std::move(left), depth_left - 1, out);
    const int r = build(std::move(right), depth_left - 1, out);
    out[id].left = l;
    out[id].right = r;
    return id;
  }

  const Problem& p_;
  std::size_t min_leaf_;
  std::vector<std::uint8_t> side_;
};

double problem_sse(const WeakHypothesis& h, const Problem& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = h(p.data.row(p.rows[i])) - p.targets[i];
    s += p.w(i) * r * r;
  }
  return s;
}

void validate_problem(const OracleSpec& spec, const Problem& p) {
  spec.validate();
  if (p.rows.empty()) throw OracleError("oracle called on an empty subset");
  if (p.targets.size() != p.rows.size())
    throw OracleError("targets length " + std::to_string(p.targets.size()) + " != subset size " +
                      std::to_string(p.rows.size()));
  for (std::size_t r : p.rows)
    if (r >= p.data.size()) throw OracleError("subset row " + std::to_string(r) + " out of range");
  for (double t : p.targets)
    if (!std::isfinite(t)) throw OracleError("non-finite target");
  if (p.weights) {
    if (p.weights->size() != p.rows.size()) throw OracleError("weights length != subset size");
    double total = 0.0;
    for (double w : *p.weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw OracleError("weights must be finite and non-negative");
      total += w;
    }
    if (!(total > 0.0)) throw OracleError("weights are all zero");
  }
}

WeakHypothesis fit_problem(const OracleSpec& spec, const Problem& p) {
  validate_problem(spec, p);
  const WeakHypothesis constant = WeakHypothesis::constant(weighted_mean(p));
  WeakHypothesis h = constant;
  switch (spec.kind) {
    case OracleKind::Constant:
      return constant;
    case OracleKind::Linear:
      h = fit_linear(p, spec.ridge);
      break;
    case OracleKind::Stump:
      h = WeakHypothesis(TreeGrower(p, spec.min_leaf).grow(1));
      break;
    case OracleKind::Tree:
      h = WeakHypothesis(TreeGrower(p, spec.min_leaf).grow(spec.depth));
      break;
  }
  // Constants belong to every class, so never return anything worse.
  if (problem_sse(h, p) > problem_sse(constant, p)) return constant;
  if (const auto* t = std::get_if<TreeHypothesis>(&h.body()); t && t->nodes.size() == 1) return constant;
  return h;
}

}  // namespace

WeakHypothesis fit(const OracleSpec& spec, const Dataset& data, std::span<const std::size_t> rows,
                   std::optional<std::span<const double>> weights) {
  std::vector<double> targets;
  targets.reserve(rows.size());
  for (std::size_t r : rows) targets.push_back(r < data.size() ? data.label(r) : 0.0);
  return fit_problem(spec, Problem{data, rows, targets, weights});
}

WeakHypothesis residual_fit(const OracleSpec& spec, const Dataset& data,
                            std::span<const std::size_t> rows, std::span<const double> targets,
                            std::optional<std::span<const double>> weights) {
  return fit_problem(spec, Problem{data, rows, targets, weights});
}

double subset_sse(const WeakHypothesis& h, const Dataset& data, std::span<const std::size_t> rows,
                  std::span<const double> targets, std::optional<std::span<const double>> weights) {
  return problem_sse(h, Problem{data, rows, targets, weights});
}

}  // namespace lsboost
