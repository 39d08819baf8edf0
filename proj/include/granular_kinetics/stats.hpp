// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file stats.hpp
//! Small statistics toolkit: sample moments, least squares, replica bootstrap.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace gk::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw ContractViolation("mean: empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

//! Unbiased sample variance.
inline double variance(std::span<const double> x) {
  if (x.size() < 2) throw ContractViolation("variance: need at least two values");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

inline double standard_error(std::span<const double> x) {
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

inline double median(std::span<const double> x) {
  if (x.empty()) throw ContractViolation("median: empty sample");
  std::vector<double> v(x.begin(), x.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double residual_sd = 0.0;
  std::size_t points = 0;
};

//! Ordinary least squares y = intercept + slope x.
inline LinearFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractViolation("ols: size mismatch");
  if (x.size() < 2) throw ContractViolation("ols: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ContractViolation("ols: x values are all equal");
  LinearFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    const double s2 = rss / (n - 2.0);
    f.residual_sd = std::sqrt(s2);
    f.slope_se = std::sqrt(s2 / sxx);
    f.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  }
  return f;
}

//! Statistic of a resampled replica set, given as indices into the replicas.
using ReplicaStatistic = std::function<double(std::span<const std::size_t>)>;

//! Values of `statistic` over `resamples` bootstrap draws (with replacement) of
//! `replicas` indices. Non-finite values are dropped.
inline std::vector<double> bootstrap(std::size_t replicas, std::size_t resamples, RandomStream& rng,
                                     const ReplicaStatistic& statistic) {
  if (replicas < 2) throw ContractViolation("bootstrap: need at least two replicas");
  std::vector<double> values;
  values.reserve(resamples);
  std::vector<std::size_t> idx(replicas);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& i : idx) i = rng.index(replicas);
    const double v = statistic(idx);
    if (std::isfinite(v)) values.push_back(v);
  }
  return values;
}

//! Standard deviation of the bootstrap distribution.
inline double bootstrap_se(std::size_t replicas, std::size_t resamples, RandomStream& rng,
                           const ReplicaStatistic& statistic) {
  const auto values = bootstrap(replicas, resamples, rng, statistic);
  if (values.size() < 2) return std::numeric_limits<double>::infinity();
  return stddev(values);
}

}  // namespace gk::stats
