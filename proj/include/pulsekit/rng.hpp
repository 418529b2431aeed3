// Deterministic random draws on top of std::mt19937_64. The distribution
// helpers are hand-rolled because std::uniform_* / std::normal_distribution
// are implementation-defined; these produce the same stream on every platform,
// which the whole-run determinism contract depends on.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pulsekit {

using RngEngine = std::mt19937_64;

// Salts for deriving per-consumer engines from the single run seed so the
// streams stay independent. Documented part of the reproducibility contract.
inline constexpr std::uint64_t kSeedSaltForest = 0x666f726573740001ULL;
inline constexpr std::uint64_t kSeedSaltSynth = 0x73796e74680002ULL;
inline constexpr std::uint64_t kSeedSaltSplit = 0x73706c69740003ULL;

inline RngEngine seeded_engine(std::uint64_t seed, std::uint64_t salt) {
  return RngEngine(seed ^ salt);
}

// Uniform in [0, bound) by rejection; unbiased and portable.
inline std::uint64_t uniform_below(RngEngine& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

// Uniform in [0, 1) with 53-bit resolution.
inline double uniform_unit(RngEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(RngEngine& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// Standard normal via Box-Muller (no cached second value: two uniforms per
// draw, one output, so consumption stays easy to reason about).
inline double gaussian(RngEngine& rng) {
  double u1;
  do {
    u1 = uniform_unit(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// In-place Fisher-Yates.
template <typename T>
void shuffle(RngEngine& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace pulsekit
