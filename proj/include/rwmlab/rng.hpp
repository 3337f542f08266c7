#pragma once

// Random number generation for the simulation lab.
//
// Every chain owns exactly one Rng. The generator is xoshiro256++ (Blackman &
// Vigna, 2019) seeded through SplitMix64, both fully specified in the public
// reference implementations, so a given seed produces the same stream on
// every platform. Variates that need more than a uniform (normal, gamma,
// Student-t) go through Boost.Random, whose algorithms are fixed source code
// rather than implementation-defined like the <random> distributions.

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

#include <boost/random/normal_distribution.hpp>

namespace rwmlab {

/// SplitMix64 finalizer. Used for seeding and for stream derivation.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over bytes; used to turn spec descriptions into stable ids.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of the stream for one chain of a sweep.
///
///   h0 = splitmix64_mix(master_seed)
///   h1 = splitmix64_mix(h0 ^ dim)
///   h2 = splitmix64_mix(h1 ^ spec_id)
///   h3 = splitmix64_mix(h2 ^ seed_index)
///
/// Each component is folded in separately, so adding a dimension or a spec to
/// a sweep leaves the streams of the existing chains untouched.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t dim,
                                           std::uint64_t spec_id,
                                           std::uint64_t seed_index) noexcept {
  std::uint64_t h = splitmix64_mix(master_seed);
  h = splitmix64_mix(h ^ dim);
  h = splitmix64_mix(h ^ spec_id);
  return splitmix64_mix(h ^ seed_index);
}

/// xoshiro256++ 1.0. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0x853c49e6748fea9bULL) noexcept { reseed(seed); }

  void reseed(std::uint64_t seed) noexcept {
    // SplitMix64 sequence fills the state; the state can never be all zero
    // because the mixer is a bijection applied to distinct inputs.
    std::uint64_t x = seed;
    for (auto& s : state_) {
      s = splitmix64_mix(x);
      x += 0x9e3779b97f4a7c15ULL;
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1): 53 random bits, centred in their cell.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) by Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Standard normal via the Boost.Random ziggurat (stateless between calls).
  double normal() {
    boost::random::normal_distribution<double> dist;
    return dist(*this);
  }

  /// Exponential(1).
  double exponential();

  /// Gamma(shape, scale).
  double gamma(double shape, double scale);

  /// Student-t with `df` degrees of freedom.
  double student_t(double df);

  const std::array<std::uint64_t, 4>& state() const noexcept { return state_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace rwmlab
