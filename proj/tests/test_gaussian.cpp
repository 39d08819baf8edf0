// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
#include "granular_kinetics/gaussian.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace gk {
namespace {

using std::numbers::pi;

TEST(MaxwellianDensity, UnitValueAtOnes) {
  const auto m = MaxwellianParams::centered(3, 1.0, 1.0);
  const std::vector<double> v{1, 1, 1};
  EXPECT_NEAR(maxwellian_density(m, v), std::pow(2 * pi, -1.5) * std::exp(-1.5), 1e-15);
  EXPECT_NEAR(maxwellian_density(m, v), 0.014167, 1e-6);
}

TEST(MaxwellianDensity, ShiftedAndScaled) {
  const MaxwellianParams m{2.0, {0.5, -0.5}, 0.25};
  const std::vector<double> v{0.5, -0.5};
  EXPECT_NEAR(maxwellian_density(m, v), 2.0 / (2 * pi * 0.25), 1e-14);
  const MaxwellianParams bad{1.0, {0.0, 0.0}, -1.0};
  EXPECT_THROW(maxwellian_density(bad, v), ContractViolation);
}

TEST(RadialMoment, LowOrderClosedForms) {
  for (int n : {2, 3, 5}) {
    const auto m = MaxwellianParams::centered(n, 1.0, 1.0);
    EXPECT_NEAR(radial_moment(m, 1.0), n, 1e-13);
    EXPECT_NEAR(radial_moment(m, 2.0), n * (n + 2.0), 1e-12);
  }
  const auto m3 = MaxwellianParams::centered(3, 1.0, 1.0);
  EXPECT_NEAR(radial_moment(m3, 1.5), 32.0 * pi / std::pow(2 * pi, 1.5), 1e-13);
  EXPECT_NEAR(radial_moment(m3, 1.5), 6.383076, 1e-6);
}

TEST(RadialMoment, ScalesWithMassAndTemperature) {
  const auto a = MaxwellianParams::centered(3, 1.0, 1.0);
  const auto b = MaxwellianParams::centered(3, 2.5, 0.3);
  for (double k : {0.5, 1.5, 2.5}) {
    EXPECT_NEAR(radial_moment(b, k), 2.5 * std::pow(0.3, k) * radial_moment(a, k), 1e-12 * radial_moment(b, k));
  }
}

TEST(RadialMoment, ClosedFormMatchesQuadrature) {
  for (int n : {2, 3}) {
    for (double theta : {0.01, 1.0, 7.0}) {
      const auto m = MaxwellianParams::centered(n, 1.3, theta);
      for (double k : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
        const double closed = radial_moment(m, k);
        EXPECT_NEAR(radial_moment_quadrature(m, k), closed, 1e-10 * closed) << n << " " << theta << " " << k;
      }
    }
  }
}

TEST(RadialMoment, RejectsInvalidInputs) {
  EXPECT_THROW(radial_moment(MaxwellianParams::centered(3, 1.0, 1.0), -2.0), ContractViolation);
  EXPECT_THROW(radial_moment(MaxwellianParams{1.0, {0.1, 0.0, 0.0}, 1.0}, 1.0), ContractViolation);
  EXPECT_THROW(radial_moment(MaxwellianParams::centered(3, 0.0, 1.0), 1.0), ContractViolation);
}

TEST(PairMoments, UnitValues) {
  const auto m = MaxwellianParams::centered(3, 1.0, 1.0);
  EXPECT_NEAR(pair_moment_u3(m), 18.0540, 1e-4);
  EXPECT_NEAR(pair_moment_v2u3(m), 81.244, 1e-3);
}

TEST(PairMoments, ReductionMatchesNestedQuadrature) {
  for (int n : {2, 3}) {
    for (double rho : {0.5, 2.0}) {
      for (double theta : {0.05, 1.0, 3.0}) {
        const auto m = MaxwellianParams::centered(n, rho, theta);
        const double u3 = pair_moment_u3(m);
        const double v2u3 = pair_moment_v2u3(m);
        EXPECT_NEAR(pair_moment_direct(m, 0.0), u3, 1e-9 * u3);
        EXPECT_NEAR(pair_moment_direct(m, 1.0), v2u3, 1e-9 * v2u3);
      }
    }
  }
}

TEST(PairMoments, Homogeneity) {
  const auto a = MaxwellianParams::centered(3, 1.0, 1.0);
  const auto b = MaxwellianParams::centered(3, 3.0, 0.4);
  EXPECT_NEAR(pair_moment_u3(b), 9.0 * std::pow(0.4, 1.5) * pair_moment_u3(a), 1e-12 * pair_moment_u3(b));
  EXPECT_NEAR(pair_moment_v2u3(b), 9.0 * std::pow(0.4, 2.5) * pair_moment_v2u3(a), 1e-12 * pair_moment_v2u3(b));
}

TEST(PairMoments, MonteCarloCrossCheck) {
  const auto m = MaxwellianParams::centered(3, 1.0, 1.0);
  RandomStream rng(17, 0);
  const int n = 1'000'000;
  double s_u = 0, s_u2 = 0, s_v = 0, s_v2 = 0, s_w = 0;
  for (int i = 0; i < n; ++i) {
    double v[3], w[3], u2 = 0, v2 = 0, w2 = 0;
    for (int k = 0; k < 3; ++k) {
      v[k] = rng.normal();
      w[k] = rng.normal();
      u2 += (v[k] - w[k]) * (v[k] - w[k]);
      v2 += v[k] * v[k];
      w2 += w[k] * w[k];
    }
    const double u3 = u2 * std::sqrt(u2);
    s_u += u3;
    s_u2 += u3 * u3;
    s_v += v2 * u3;
    s_v2 += v2 * u3 * v2 * u3;
    s_w += w2 * u3;
  }
  const double mean_u = s_u / n, se_u = std::sqrt((s_u2 / n - mean_u * mean_u) / n);
  const double mean_v = s_v / n, se_v = std::sqrt((s_v2 / n - mean_v * mean_v) / n);
  EXPECT_NEAR(mean_u, pair_moment_u3(m), 4 * se_u);
  EXPECT_NEAR(mean_v, pair_moment_v2u3(m), 4 * se_v);
  // Weighting by |v_*|^2 instead of |v|^2 gives the same value.
  EXPECT_NEAR(s_w / n, pair_moment_v2u3(m), 6 * se_v);
}

TEST(QuasiElastic, HardSphereTemperature) {
  const auto moments = angular_moments(CrossSection::hard_sphere(1.0));
  const auto tc = quasi_elastic_temperature(moments, 3, 1.0);
  EXPECT_NEAR(tc.theta_bar_1, 9.0 / (256.0 * pi), 1e-15);
  EXPECT_NEAR(tc.theta_bar_1, 0.0111906, 1e-7);
  EXPECT_NEAR(tc.E_bar_1, 3.0 * tc.theta_bar_1, 1e-15);
  EXPECT_NEAR(tc.theta_bar_1, (tc.k1 / tc.k2) * (tc.k1 / tc.k2), 1e-12 * tc.theta_bar_1);
}

TEST(QuasiElastic, InverseSquareScalingInKernel) {
  const auto base = quasi_elastic_temperature(angular_moments(CrossSection::hard_sphere(1.0)), 3);
  for (double lambda : {0.5, 2.0, 10.0}) {
    const auto tc = quasi_elastic_temperature(angular_moments(CrossSection::hard_sphere(lambda)), 3);
    EXPECT_NEAR(tc.theta_bar_1, base.theta_bar_1 / (lambda * lambda), 1e-12 * tc.theta_bar_1);
  }
}

TEST(QuasiElastic, TemperatureIndependentOfMass) {
  const auto moments = angular_moments(CrossSection::hard_sphere(1.0));
  const auto a = quasi_elastic_temperature(moments, 3, 1.0);
  const auto b = quasi_elastic_temperature(moments, 3, 4.0);
  EXPECT_DOUBLE_EQ(a.theta_bar_1, b.theta_bar_1);
  EXPECT_NEAR(b.k1, 16.0 * a.k1, 1e-12);
  EXPECT_NEAR(b.k2, 16.0 * a.k2, 1e-12 * b.k2);
}

TEST(QuasiElastic, PsiShape) {
  const auto tc = quasi_elastic_temperature(angular_moments(CrossSection::hard_sphere(1.0)), 3);
  const double t = tc.theta_bar_1;
  const double scale = tc.k1 * t;
  EXPECT_NEAR(psi(t, tc), 0.0, 1e-12 * scale);
  EXPECT_NEAR(psi(4 * t, tc), -4.0 * tc.k2 * std::pow(t, 1.5), 1e-12 * scale);
  EXPECT_NEAR(psi(t / 4, tc), tc.k2 * std::pow(t, 1.5) / 8.0, 1e-12 * scale);
  EXPECT_GT(psi(1e-8 * t, tc), 0.0);
  EXPECT_LT(psi(1e-8 * t, tc), 1e-7 * scale);
  EXPECT_THROW(psi(0.0, tc), ContractViolation);
}

TEST(QuasiElastic, FixedPointBalancesDissipation) {
  for (int n : {2, 3}) {
    const auto moments = detail::unit_kernel_moments(n);
    for (double rho : {0.5, 1.0, 2.0}) {
      const auto tc = quasi_elastic_temperature(moments, n, rho);
      const auto g1 = MaxwellianParams::centered(n, rho, tc.theta_bar_1);
      const double lhs = rho * rho * n * tc.theta_bar_1;
      EXPECT_NEAR(maxwellian_dissipation(g1, moments), lhs, 1e-12 * lhs);
    }
  }
}

TEST(EigenIdentity, ResidualVanishes) {
  for (int n : {2, 3}) {
    const auto moments = detail::unit_kernel_moments(n);
    for (double rho : {0.5, 1.0, 2.0}) {
      const auto tc = quasi_elastic_temperature(moments, n, rho);
      const auto eig = energy_eigen_identity(moments, tc, rho);
      const double scale = rho * std::abs(eig.E_phi1);
      EXPECT_LT(eig.residual, 1e-8 * scale) << n << " " << rho;
      EXPECT_NEAR(eig.E_phi1, eig.E_phi1_closed, 1e-9 * eig.E_phi1_closed);
      EXPECT_NEAR(eig.D_tilde, eig.D_tilde_closed, 1e-9 * eig.D_tilde_closed);
      EXPECT_NEAR(eig.eigenvalue_slope, -rho, 1e-8 * rho);
    }
  }
}

TEST(EigenIdentity, NormaliserGivesUnitWeightedMass) {
  // c0 int | |v|^2 - N theta | <v>^2 G_1 = 1 by construction; check by direct radial sum.
  const auto moments = angular_moments(CrossSection::hard_sphere(1.0));
  const auto tc = quasi_elastic_temperature(moments, 3, 1.0);
  const double t = tc.theta_bar_1;
  const double norm = std::pow(2 * pi * t, -1.5) * 4 * pi;
  double sum = 0.0;
  const int steps = 200000;
  const double r_max = 40.0 * std::sqrt(t), h = r_max / steps;
  for (int i = 0; i <= steps; ++i) {
    const double r = i * h;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    sum += w * norm * r * r * std::exp(-r * r / (2 * t)) * std::abs(r * r - 3 * t) * (1 + r * r);
  }
  EXPECT_NEAR(tc.c0 * sum * h, 1.0, 1e-6);
}

TEST(IdentityTable, AllChecksPass) {
  const std::vector<int> dims{2, 3};
  const std::vector<double> masses{0.5, 1.0, 2.0};
  const auto checks = gaussian_identity_checks(dims, masses);
  EXPECT_EQ(checks.size(), 2u * 3u * 9u);
  for (const auto& c : checks) EXPECT_TRUE(c.pass()) << c.name << " N=" << c.dimension << " rho=" << c.rho
                                                     << " residual=" << c.relative_residual;
}

TEST(SampleMaxwellian, MomentsOfLargeSample) {
  const auto m = MaxwellianParams::centered(3, 1.0, 1.0);
  RandomStream rng(1, stream_id(StreamPurpose::kInitialState, 0, 0));
  const std::size_t count = 1'000'000;
  const auto ens = sample_maxwellian(m, count, rng);
  const auto data = ens.data();
  double mean[3] = {0, 0, 0}, e2 = 0, e4 = 0;
  for (std::size_t i = 0; i < count; ++i) {
    double v2 = 0;
    for (int k = 0; k < 3; ++k) {
      mean[k] += data[3 * i + k];
      v2 += data[3 * i + k] * data[3 * i + k];
    }
    e2 += v2;
    e4 += v2 * v2;
  }
  for (double& x : mean) x /= count;
  const double theta = e2 / count / 3.0;
  EXPECT_NEAR(theta, 1.0, 5e-3);
  for (double x : mean) EXPECT_NEAR(x, 0.0, 3.0 / std::sqrt(3.0e6));
  EXPECT_NEAR(e4 / count, 15.0, 0.2);
}

TEST(SampleMaxwellian, ZeroMomentumAndShift) {
  const MaxwellianParams m{2.0, {1.0, -2.0}, 0.5};
  RandomStream rng(2, 0);
  const auto ens = sample_maxwellian(m, 1000, rng, true);
  double mean[2] = {0, 0};
  for (std::size_t i = 0; i < ens.size(); ++i)
    for (int k = 0; k < 2; ++k) mean[k] += ens.velocity(i)[k];
  EXPECT_NEAR(mean[0] / 1000, 1.0, 1e-13);
  EXPECT_NEAR(mean[1] / 1000, -2.0, 1e-13);
  EXPECT_DOUBLE_EQ(ens.rho(), 2.0);
  EXPECT_THROW(sample_maxwellian(m, 1, rng), ContractViolation);
}

}  // namespace
}  // namespace gk
