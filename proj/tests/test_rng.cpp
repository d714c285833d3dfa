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

#include "perturbml/rng.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

namespace perturbml {
namespace {

// Known-answer vectors cross-checked against an independent Philox4x64-10
// implementation (one that advances its counter before emitting a block, so
// its output for counter c matches this block function at c + 1).
TEST(Philox, KnownAnswerZeroKey) {
  const auto block1 = philox4x64_block({1, 0, 0, 0}, {0, 0});
  EXPECT_EQ(block1[0], 0x02f4ba6408e4d89bULL);
  EXPECT_EQ(block1[1], 0x3dd62b0b9ca8c5b2ULL);
  EXPECT_EQ(block1[2], 0x1c8667a55d902e79ULL);
  EXPECT_EQ(block1[3], 0x907d7a052fd5b4dcULL);
  const auto block2 = philox4x64_block({2, 0, 0, 0}, {0, 0});
  EXPECT_EQ(block2[0], 0x809bf322883987c3ULL);
  EXPECT_EQ(block2[1], 0x471128b9e807f7ddULL);
  EXPECT_EQ(block2[2], 0xf250ba0dbec065b7ULL);
  EXPECT_EQ(block2[3], 0xfc6ed66767a457bcULL);
}

TEST(Philox, KnownAnswerNonzeroKey) {
  const auto out = philox4x64_block({1, 0, 0, 0}, {0xDEADBEEF1234ULL, 0});
  EXPECT_EQ(out[0], 0xf849e5c3505e5a52ULL);
  EXPECT_EQ(out[1], 0xc058bca708388368ULL);
  EXPECT_EQ(out[2], 0x7324d9b63d98d25cULL);
  EXPECT_EQ(out[3], 0x346c08bf0cf46da4ULL);
}

TEST(Philox, KnownAnswerCounterAndKey) {
  const auto out = philox4x64_block({12346, 0, 0, 0}, {67890, 0});
  EXPECT_EQ(out[0], 0x4c252dfb0ddaf84cULL);
  EXPECT_EQ(out[1], 0x6cead0e915b9a089ULL);
  EXPECT_EQ(out[2], 0x4d0da02e91603f01ULL);
  EXPECT_EQ(out[3], 0xcf10218f441aa3c2ULL);
}

TEST(PhiloxRng, DeterministicGivenSeedAndStream) {
  PhiloxRng a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
  }
  PhiloxRng c(42, 7), d(42, 7);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(c.normal(), d.normal());
  }
}

TEST(PhiloxRng, StreamsDiffer) {
  PhiloxRng a(42, 0), b(42, 1), c(43, 0);
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    if (va == b.next_u64()) ++equal_ab;
    if (va == c.next_u64()) ++equal_ac;
  }
  EXPECT_EQ(equal_ab, 0);
  EXPECT_EQ(equal_ac, 0);
}

TEST(PhiloxRng, UniformRangeAndMoments) {
  PhiloxRng rng(1, 0);
  const int n = 200000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.5, 0.005);
  EXPECT_NEAR(var, 1.0 / 12.0, 0.005);
}

TEST(PhiloxRng, NormalMoments) {
  PhiloxRng rng(2, 0);
  const int n = 200000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sum_sq / n - mean * mean, 1.0, 0.02);
}

TEST(PhiloxRng, RademacherIsBinary) {
  PhiloxRng rng(3, 0);
  int plus = 0;
  for (int i = 0; i < 10000; ++i) {
    const double r = rng.rademacher();
    ASSERT_TRUE(r == 1.0 || r == -1.0);
    if (r > 0) ++plus;
  }
  EXPECT_NEAR(plus / 10000.0, 0.5, 0.02);
}

}  // namespace
}  // namespace perturbml
