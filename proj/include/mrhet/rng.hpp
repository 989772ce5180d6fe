#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace mrhet {

// splitmix64, used for state seeding and substream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over bytes; keys per-SNP random substreams by id, not by row index.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic generator with a pinned algorithm identity so that seeded
// results are reproducible across compilers and platforms:
//   - state:    xoshiro256++ (Blackman & Vigna), seeded via splitmix64
//   - uniform:  top 53 bits of the raw draw, mapped to [0,1)
//   - normal:   Box-Muller, exactly two raw draws per variate (no caching)
//   - binomial: sum of Bernoulli trials, one uniform each
// Streams are single-owner; independent substreams come from derive().
class Rng {
public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next() {
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

  // uniform on [0,1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal; first uniform is shifted into (0,1] so log() is finite
  double normal() {
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  int binomial(int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) {
      if (uniform() < p) ++k;
    }
    return k;
  }

  // Seed for an independent substream of (seed, key); used per replicate and
  // per SNP so results do not depend on iteration or row order.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t key) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (key + 0x632be59bd9b4e019ULL));
    const std::uint64_t a = splitmix64(s);
    return a ^ splitmix64(s);
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace mrhet
