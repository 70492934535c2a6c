// Copyright 2026 The paritysim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace paritysim {

// splitmix64 step; also used as the seed expander and stream mixer so that
// trajectory streams are reproducible across platforms and thread counts.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream seed for trajectory k: a pure function of (base_seed, k), so
/// ensembles are independent of scheduling and worker count.
inline std::uint64_t derive_stream_seed(std::uint64_t base_seed,
                                        std::uint64_t k) {
  std::uint64_t s = base_seed ^ (0xD1B54A32D192ED03ULL * (k + 1));
  splitmix64(s);
  return splitmix64(s);
}

/// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
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

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

/// Standard normal variates via the Marsaglia polar method.  Fully
/// deterministic for a given seed; no libm distribution objects involved, so
/// streams are identical across standard libraries.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * gen_.uniform() - 1.0;
      v = 2.0 * gen_.uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  std::uint64_t next_raw() { return gen_.next(); }

 private:
  Xoshiro256pp gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace paritysim
