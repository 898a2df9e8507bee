#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lsboost/dataset.hpp"

namespace lsboost {

enum class Surface { C0, C1 };
Surface parse_surface(std::string_view name);  // "c0" | "c1"; throws UsageError
std::string to_string(Surface s);

/// Four paraboloids with minima at (+-1, +-1); domain [-2,2]^2.
double eval_c0(double x1, double x2) noexcept;
/// Oscillating terrain; domain [-1,1]^2.
double eval_c1(double x1, double x2) noexcept;
double eval_surface(Surface s, double x1, double x2) noexcept;

/// Affine label map y -> (y - min) / (max - min); a zero range maps to 0.
struct Normalization {
  double min = 0.0;
  double max = 1.0;
  std::optional<double> cap;  // labels are clamped at cap before rescaling

  double apply(double raw) const noexcept;  // result clamped into [0,1]
  static Normalization identity() { return {}; }
  bool operator==(const Normalization&) const = default;
};

struct SurfaceSpec {
  Surface surface = Surface::C0;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  double noise_sd = 0.0;
  int threads = 1;
};

struct SyntheticSample {
  Dataset data;
  Normalization normalization;
};

inline constexpr std::string_view kGeneratorName = "splitmix64-counter-v1";

/// Counter-based SplitMix64: the k-th draw for `seed` is a pure function of (seed, k).
std::uint64_t splitmix64_draw(std::uint64_t seed, std::uint64_t k) noexcept;
/// Uniform double in [0,1) with 53 random bits.
double uniform_draw(std::uint64_t seed, std::uint64_t k) noexcept;

/// Uniform sample on the surface's domain. Labels are min-max normalized with
/// the sample's own range unless `reuse` supplies constants from another sample.
SyntheticSample sample_surface(const SurfaceSpec& spec,
                               const std::optional<Normalization>& reuse = std::nullopt);

}  // namespace lsboost
