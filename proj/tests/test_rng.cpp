// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
#include "granular_kinetics/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace gk {
namespace {

// Known-answer vectors for Philox4x32-10.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(RandomStream, WordsAreConsecutivePhiloxBlocks) {
  const std::uint64_t seed = 0x0123456789abcdefull, stream = 0xfedcba9876543210ull;
  RandomStream rng(seed, stream);
  const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (std::uint64_t block = 0; block < 40; ++block) {
    const auto expected = philox4x32_10({static_cast<std::uint32_t>(block), 0u, static_cast<std::uint32_t>(stream),
                                         static_cast<std::uint32_t>(stream >> 32)},
                                        key);
    for (int w = 0; w < 4; ++w) ASSERT_EQ(rng(), expected[w]) << block << " " << w;
  }
}

TEST(RandomStream, SameSeedAndStreamReproduce) {
  RandomStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RandomStream, DistinctStreamsDiffer) {
  RandomStream a(42, 7), b(42, 8), c(43, 7);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    same_ab += (x == b());
    same_ac += (x == c());
  }
  EXPECT_LT(same_ab, 3);
  EXPECT_LT(same_ac, 3);
}

TEST(RandomStream, UniformMomentsAndRange) {
  RandomStream rng(1, 0);
  const int n = 1'000'000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum2 / n, 1.0 / 3.0, 5e-3);
}

TEST(RandomStream, IndexIsUniform) {
  RandomStream rng(3, 1);
  const int bins = 10, n = 1'000'000;
  std::vector<int> counts(bins, 0);
  for (int i = 0; i < n; ++i) {
    const auto k = rng.index(bins);
    ASSERT_LT(k, static_cast<std::uint64_t>(bins));
    ++counts[k];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / bins) * (c - n / bins) / double(n / bins);
  EXPECT_LT(chi2, 27.88);  // chi-squared(9) upper 0.001 quantile
}

TEST(RandomStream, NormalMoments) {
  RandomStream rng(5, 2);
  const int n = 1'000'000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5e-3);
  EXPECT_NEAR(s2 / n, 1.0, 5e-3);
  EXPECT_NEAR(s4 / n, 3.0, 3e-2);
}

}  // namespace
}  // namespace gk
