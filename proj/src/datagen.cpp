#include "lsboost/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "lsboost/error.hpp"

namespace lsboost {

Surface parse_surface(std::string_view name) {
  if (name == "c0") return Surface::C0;
  if (name == "c1") return Surface::C1;
  throw UsageError("unknown surface '" + std::string(name) + "' (expected c0|c1)");
}

std::string to_string(Surface s) { return s == Surface::C0 ? "c0" : "c1"; }

// Branches: x1 <= 0 vs x1 > 0, and x2 >= 0 vs x2 < 0.
double eval_c0(double x1, double x2) noexcept {
  const double cx = x1 <= 0.0 ? x1 + 1.0 : x1 - 1.0;
  const double cy = x2 >= 0.0 ? x2 - 1.0 : x2 + 1.0;
  return cx * cx + cy * cy;
}

double eval_c1(double x1, double x2) noexcept {
  const bool left = x1 <= 0.0;
  const double wave = left ? std::cos(-8.0 * x1) : std::cos(8.0 * x1);
  const double cx = left ? x1 + 1.0 : x1 - 1.0;
  const double cy = x2 >= 0.0 ? x2 - 1.0 : x2 + 1.0;
  const double bowl = (1.5 * x1 + 4.0) * cx * cx / (x2 + 3.0) + cy * cy;
  return x1 + 20.0 * x1 * x2 * x2 * wave * std::sin(8.0 * x2) * bowl;
}

double eval_surface(Surface s, double x1, double x2) noexcept {
  return s == Surface::C0 ? eval_c0(x1, x2) : eval_c1(x1, x2);
}

double Normalization::apply(double raw) const noexcept {
  if (cap) raw = std::min(raw, *cap);
  const double range = max - min;
  if (!(range > 0.0)) return 0.0;
  return std::clamp((raw - min) / range, 0.0, 1.0);
}

std::uint64_t splitmix64_draw(std::uint64_t seed, std::uint64_t k) noexcept {
  std::uint64_t z = seed + (k + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform_draw(std::uint64_t seed, std::uint64_t k) noexcept {
  return static_cast<double>(splitmix64_draw(seed, k) >> 11) * 0x1.0p-53;
}

SyntheticSample sample_surface(const SurfaceSpec& spec, const std::optional<Normalization>& reuse) {
  if (spec.n < 1) throw UsageError("sample size must be >= 1");
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) throw UsageError("noise sd must be >= 0");
  const double half = spec.surface == Surface::C0 ? 2.0 : 1.0;
  const auto n = static_cast<std::ptrdiff_t>(spec.n);
  std::vector<double> features(spec.n * 2);
  std::vector<double> raw(spec.n);

#pragma omp parallel for schedule(static) num_threads(std::max(1, spec.threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto base = static_cast<std::uint64_t>(i) * 4;
    const double x1 = -half + 2.0 * half * uniform_draw(spec.seed, base);
    const double x2 = -half + 2.0 * half * uniform_draw(spec.seed, base + 1);
    double y = eval_surface(spec.surface, x1, x2);
    if (spec.noise_sd > 0.0) {
      // Box-Muller; 1 - u keeps the log argument in (0,1].
      const double u1 = 1.0 - uniform_draw(spec.seed, base + 2);
      const double u2 = uniform_draw(spec.seed, base + 3);
      y += spec.noise_sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    features[2 * i] = x1;
    features[2 * i + 1] = x2;
    raw[i] = y;
  }

  Normalization norm;
  if (reuse) {
    norm = *reuse;
  } else {
    const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
    norm.min = *lo;
    norm.max = *hi;
  }
  std::vector<double> labels(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) labels[i] = norm.apply(raw[i]);
  return {Dataset(std::move(features), std::move(labels), 2), norm};
}

}  // namespace lsboost
