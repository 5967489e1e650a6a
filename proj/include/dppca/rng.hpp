// Copyright 2026 The dppca Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Deterministic random number generation. Every stochastic routine in this
// library consumes an explicit 64-bit seed; identical seeds must reproduce
// identical outputs bit for bit across runs and platforms. std::mt19937_64 is
// fully specified by the standard, but the std distributions are not, so the
// uniform and Gaussian transforms are implemented here.

#ifndef DPPCA_RNG_HPP_
#define DPPCA_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace dppca {

// SplitMix64 output function (Steele, Lea, Flood 2014). Used for seed
// derivation because it is a bijective avalanche mix of the 64-bit state.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives a stream seed from a base seed and a path of labels. Feeding each
// path element through SplitMix64 keeps distinct paths decorrelated even when
// they share a prefix or differ in one low bit.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = base;
  (void)splitmix64_next(state);
  for (std::uint64_t part : path) {
    state ^= part;
    (void)splitmix64_next(state);
  }
  std::uint64_t final_state = state;
  return splitmix64_next(final_state);
}

// FNV-1a on the bytes of a label, for mixing string identifiers (experiment
// ids, mechanism names) into a seed path.
inline std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Seeded generator with portable uniform and Gaussian draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits, the standard double-from-u64 map.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1], for safe use under log().
  double uniform_positive() { return 1.0 - uniform(); }

  // Unbiased integer in [0, n), by rejection on the modulus boundary.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via the Marsaglia polar method. Pairs are generated
  // together; the spare is returned on the next call.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dppca

#endif  // DPPCA_RNG_HPP_
