#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace chambersim {

// SplitMix64 finalizer; also used to combine stream keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over the variable id.
constexpr std::uint64_t hash_id(std::string_view id) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : id) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Key of an independent sub-stream: mix(mix(mix(seed) ^ id) ^ index).
/// Streams for different variables or rows never share state, so adding a
/// sensor leaves every other sensor's draws untouched.
constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t id_hash,
                                      std::uint64_t index) noexcept {
  return mix64(mix64(mix64(seed) ^ id_hash) ^ index);
}

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t state = 0) noexcept : state_(state) {}

  Stream(std::uint64_t seed, std::string_view id, std::uint64_t index) noexcept
      : state_(substream_key(seed, hash_id(id), index)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal(double mean = 0.0, double sigma = 1.0) {
    if (sigma == 0.0) return mean;
    std::normal_distribution<double> dist(mean, sigma);
    return dist(*this);
  }

  bool bernoulli(double p = 0.5) noexcept { return uniform() < p; }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace chambersim
