#ifndef CVARQ_RANDOM_HPP
#define CVARQ_RANDOM_HPP

// Seeded random streams. Every Monte Carlo routine partitions its sample index
// range into fixed-size chunks; chunk c draws from its own mt19937_64 seeded by
// substream_seed(seed, c). Results therefore depend only on (seed, index),
// never on how chunks are scheduled.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace cvarq {

inline constexpr std::size_t kSamplesPerSubstream = 4096;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform, exponential and Bernoulli variates from raw 64-bit engine output,
/// so streams are identical across standard library implementations.
class Variates {
 public:
  explicit Variates(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Unit-mean exponential.
  double exponential() { return -std::log(uniform()); }

  bool bernoulli(double p) { return uniform() <= p; }

 private:
  std::mt19937_64 engine_;
};

/// samples * per_sample unit-mean exponential draws; sample k owns the
/// contiguous range [k * per_sample, (k + 1) * per_sample).
inline std::vector<double> exponential_draws(std::uint64_t seed, std::size_t samples,
                                             std::size_t per_sample) {
  std::vector<double> out(samples * per_sample);
  for (std::size_t first = 0, chunk = 0; first < samples; first += kSamplesPerSubstream, ++chunk) {
    Variates rng(substream_seed(seed, chunk));
    const std::size_t last = std::min(samples, first + kSamplesPerSubstream);
    for (std::size_t i = first * per_sample; i < last * per_sample; ++i) {
      out[i] = rng.exponential();
    }
  }
  return out;
}

}  // namespace cvarq

#endif  // CVARQ_RANDOM_HPP
