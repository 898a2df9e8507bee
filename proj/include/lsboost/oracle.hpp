#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "lsboost/dataset.hpp"
#include "lsboost/hypothesis.hpp"

namespace lsboost {

enum class OracleKind { Constant, Linear, Stump, Tree };

/// Squared-error regression oracle configuration.
struct OracleSpec {
  OracleKind kind = OracleKind::Stump;
  int depth = 1;             // tree only; stump is always depth 1
  std::size_t min_leaf = 1;  // stump/tree
  double ridge = 1e-10;      // linear only

  static OracleSpec constant() { return {OracleKind::Constant}; }
  static OracleSpec linear(double ridge = 1e-10) { return {OracleKind::Linear, 1, 1, ridge}; }
  static OracleSpec stump(std::size_t min_leaf = 1) { return {OracleKind::Stump, 1, min_leaf}; }
  static OracleSpec tree(int depth, std::size_t min_leaf = 1) {
    return {OracleKind::Tree, depth, min_leaf};
  }

  /// Parses "constant", "linear", "stump" or "tree:D". Throws UsageError.
  static OracleSpec parse(const std::string& text);
  std::string to_string() const;

  /// Exact empirical risk minimizers (constant, linear, stump). Depth >= 2 trees are greedy.
  bool exact_erm() const noexcept {
    return kind != OracleKind::Tree || depth == 1;
  }

  void validate() const;  // throws UsageError

  bool operator==(const OracleSpec&) const = default;
};

/// Fits the oracle to the labels of `rows`. `weights`, when given, is indexed
/// parallel to `rows`. Throws OracleError on an empty subset or all-zero weights.
WeakHypothesis fit(const OracleSpec& spec, const Dataset& data, std::span<const std::size_t> rows,
                   std::optional<std::span<const double>> weights = std::nullopt);

/// Same fitting logic against arbitrary finite targets (indexed parallel to `rows`).
WeakHypothesis residual_fit(const OracleSpec& spec, const Dataset& data,
                            std::span<const std::size_t> rows, std::span<const double> targets,
                            std::optional<std::span<const double>> weights = std::nullopt);

/// Weighted sum of squared errors of `h` on the rows against `targets`.
double subset_sse(const WeakHypothesis& h, const Dataset& data, std::span<const std::size_t> rows,
                  std::span<const double> targets,
                  std::optional<std::span<const double>> weights = std::nullopt);

}  // namespace lsboost
