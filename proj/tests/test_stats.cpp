// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
#include "granular_kinetics/stats.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "granular_kinetics/parallel.hpp"

namespace gk {
namespace {

TEST(Stats, BasicMoments) {
  const std::vector<double> x{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(stats::mean(x), 2.5);
  EXPECT_DOUBLE_EQ(stats::variance(x), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(stats::standard_error(x), std::sqrt(5.0 / 3.0 / 4.0));
  EXPECT_DOUBLE_EQ(stats::median(x), 2.5);
  const std::vector<double> odd{5, 1, 3};
  EXPECT_DOUBLE_EQ(stats::median(odd), 3.0);
}

TEST(Stats, OlsRecoversExactLine) {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(2.0 - 0.5 * i);
  }
  const auto f = stats::ols(x, y);
  EXPECT_NEAR(f.slope, -0.5, 1e-14);
  EXPECT_NEAR(f.intercept, 2.0, 1e-13);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-12);
  EXPECT_EQ(f.points, 10u);
}

TEST(Stats, OlsStandardErrorMatchesTextbook) {
  const std::vector<double> x{0, 1, 2, 3, 4}, y{0.1, 0.9, 2.2, 2.8, 4.1};
  const auto f = stats::ols(x, y);
  double sxx = 0, rss = 0;
  for (double xi : x) sxx += (xi - 2.0) * (xi - 2.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  EXPECT_NEAR(f.slope_se, std::sqrt(rss / 3.0 / sxx), 1e-14);
}

TEST(Stats, BootstrapOfMeanApproximatesStandardError) {
  RandomStream data(1, 0);
  std::vector<double> x(400);
  for (double& v : x) v = data.normal();
  RandomStream rng(2, 0);
  const double se = stats::bootstrap_se(x.size(), 500, rng, [&](std::span<const std::size_t> idx) {
    double s = 0;
    for (std::size_t i : idx) s += x[i];
    return s / idx.size();
  });
  EXPECT_NEAR(se, stats::standard_error(x), 0.15 * stats::standard_error(x));
}

TEST(Stats, BootstrapIsDeterministic) {
  auto stat = [](std::span<const std::size_t> idx) { return static_cast<double>(idx[0]); };
  RandomStream a(5, 5), b(5, 5);
  EXPECT_EQ(stats::bootstrap(10, 50, a, stat), stats::bootstrap(10, 50, b, stat));
  EXPECT_THROW(stats::bootstrap(1, 50, a, stat), ContractViolation);
}

TEST(Parallel, MapKeepsOrderAndRethrows) {
  for (unsigned threads : {1u, 3u}) {
    const auto out = parallel_map(17, threads, [](std::size_t i) { return i * i; });
    ASSERT_EQ(out.size(), 17u);
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i * i);
  }
  EXPECT_THROW(parallel_map(5, 2,
                            [](std::size_t i) -> int {
                              if (i == 3) throw std::runtime_error("boom");
                              return 0;
                            }),
               std::runtime_error);
  EXPECT_GE(resolve_threads(0), 1u);
  EXPECT_EQ(resolve_threads(4), 4u);
}

}  // namespace
}  // namespace gk
