/// @file rng.hpp
/// @brief Seeded, portable randomness for the bootstrap estimators.
///
/// Conventions (pinned so confidence intervals are cross-platform stable):
///  - generator: std::mt19937_64, whose output sequence is fixed by the standard;
///  - per-resample streams: resample i is generated from its own engine seeded
///    with splitmix64(seed + (i+1) * 0x9E3779B97F4A7C15), so resampling is
///    parallelism-invariant;
///  - bounded draws: Lemire multiply-shift rejection, no modulo bias;
///  - percentiles: linear interpolation on the sorted sample at h = (N-1)q.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace pairbench {

constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden64;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t resample_stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + (index + 1) * kGolden64);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform draw in [0, n) via Lemire's multiply-shift with rejection.
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::bounded: empty range");
    using u128 = unsigned __int128;
    std::uint64_t x = next();
    u128 m = u128(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = next();
        m = u128(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

/// Quantile by linear interpolation on an already-sorted sample.
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("percentile_sorted: empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  double h = static_cast<double>(sorted.size() - 1) * q;
  auto lo = static_cast<std::size_t>(h);
  double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double percentile(std::vector<double> sample, double q) {
  std::sort(sample.begin(), sample.end());
  return percentile_sorted(sample, q);
}

}  // namespace pairbench
