// Copyright 2026 The perturbml Authors
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

#ifndef PERTURBML_RNG_HPP_
#define PERTURBML_RNG_HPP_

#include <array>
#include <cstdint>

namespace perturbml {

// One block of the Philox4x64-10 counter-based generator. Exposed so that
// known-answer tests can exercise the permutation directly.
std::array<std::uint64_t, 4> philox4x64_block(
    const std::array<std::uint64_t, 4>& counter,
    const std::array<std::uint64_t, 2>& key);

// Counter-based random stream keyed by (seed, stream). Distinct keys give
// independent streams, so parallel trials can draw without coordination.
// All draws are deterministic functions of (seed, stream, draw index).
class PhiloxRng {
 public:
  explicit PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{seed, stream} {}

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform();

  // Standard normal via Box-Muller on explicit uniforms; pairs are cached.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // True with probability p.
  bool bernoulli(double p) { return uniform() < p; }

  // Uniformly -1 or +1.
  double rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint64_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double spare_normal_ = 0.0;
  bool have_spare_normal_ = false;
};

}  // namespace perturbml

#endif  // PERTURBML_RNG_HPP_
