// Copyright 2026 The Lacuna Authors.
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

#ifndef LACUNA_AUTODIFF_RNG_HPP_
#define LACUNA_AUTODIFF_RNG_HPP_

#include <cstdint>
#include <random>
#include <string>

namespace lacuna::ad {

// Seeded source for every stochastic choice (initialization, dropout,
// sampling). The engine's output sequence is fixed by the C++ standard, and
// the helpers below avoid the implementation-defined std distributions, so a
// seed reproduces the same stream on any conforming toolchain.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }
  uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], unbiased.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    const uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<int64_t>(next());
    const uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    uint64_t x = next();
    while (x >= limit) x = next();
    return lo + static_cast<int64_t>(x % range);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Independent child stream; the parent is not advanced.
  Rng fork(uint64_t stream) const {
    std::seed_seq seq{static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32),
                      static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
    Rng child;
    child.seed_ = seed_ ^ (stream * 0x9E3779B97F4A7C15ull);
    child.engine_.seed(seq);
    return child;
  }

  // Full engine state as text, restorable with set_state.
  std::string state() const;
  void set_state(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) { return a.seed_ == b.seed_ && a.engine_ == b.engine_; }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace lacuna::ad

#endif  // LACUNA_AUTODIFF_RNG_HPP_
