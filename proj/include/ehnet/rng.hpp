// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_RNG_HPP_
#define EHNET_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace ehnet {

// splitmix64 finalizer. Output i of the stream seeded with s is
// splitmix64_at(s, i); no state has to be carried between draws, so any
// draw is a pure function of (seed, counter) and identical on every
// platform.
inline std::uint64_t splitmix64_mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64_mix(seed + counter * 0x9E3779B97F4A7C15ull);
}

// Counter-based generator. Stateless per draw; the stateful next() helpers
// just advance an internal counter. The generator name ("splitmix64") is
// recorded in corpus index headers so regeneration is reproducible.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static const char* name() { return "splitmix64"; }

  std::uint64_t at(std::uint64_t i) const { return splitmix64_at(seed_, i); }

  // [0, 1)
  double uniform_at(std::uint64_t i) const {
    return static_cast<double>(at(i) >> 11) * 0x1.0p-53;
  }

  double uniform_at(std::uint64_t i, double lo, double hi) const {
    return lo + uniform_at(i) * (hi - lo);
  }

  // Box-Muller on counters (2i, 2i+1); avoids the platform-dependent
  // std::normal_distribution.
  double gaussian_at(std::uint64_t i) const {
    const double u1 =
        (static_cast<double>(at(2 * i) >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform_at(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::uint64_t next() { return at(counter_++); }
  double next_uniform() { return uniform_at(counter_++); }
  double next_uniform(double lo, double hi) { return uniform_at(counter_++, lo, hi); }
  double next_gaussian() { return gaussian_at(counter_++); }

  // Modulo bias is ~n/2^64, irrelevant for the set sizes used here.
  std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_below(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace ehnet

#endif  // EHNET_RNG_HPP_
