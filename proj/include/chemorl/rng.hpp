#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace chemorl {

/// Deterministic counter-less random stream (splitmix64 core).
///
/// Streams are derived from a (seed, epoch, episode, purpose) key so that
/// every episode draws the same values no matter which thread runs it or in
/// which order rollouts execute. Gaussian draws use Box-Muller without
/// caching the second variate, so the draw sequence depends only on how many
/// gaussians were requested.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  /// Independent stream keyed by (seed, a, b, purpose).
  static RandomStream derive(std::uint64_t seed, std::uint64_t a,
                             std::uint64_t b, std::uint64_t purpose) {
    std::uint64_t s = mix(seed ^ 0x243f6a8885a308d3ull);
    s = mix(s ^ mix(a));
    s = mix(s ^ mix(b ^ 0x13198a2e03707344ull));
    s = mix(s ^ mix(purpose ^ 0xa4093822299f31d0ull));
    return RandomStream(s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix_out(state_);
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double next_gaussian(double mean, double stddev) {
    return mean + stddev * next_gaussian();
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    return mix_out(z);
  }
  static std::uint64_t mix_out(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

/// Stream purposes; part of the reproducibility contract recorded in manifests.
enum class StreamPurpose : std::uint64_t {
  policy_init = 1,
  action_sampling = 2,
  disturbance = 3,
};

inline RandomStream episode_stream(std::uint64_t seed, int epoch, int episode,
                                   StreamPurpose purpose) {
  return RandomStream::derive(seed, static_cast<std::uint64_t>(epoch),
                              static_cast<std::uint64_t>(episode),
                              static_cast<std::uint64_t>(purpose));
}

}  // namespace chemorl
