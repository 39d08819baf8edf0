// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file gaussian.hpp
//! Maxwellians, deterministic quadrature oracles for Gaussian moment
//! integrals, and the quasi-elastic theory constants.
#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernel.hpp"
#include "particle_ensemble.hpp"
#include "rng.hpp"

namespace gk {

//! M_{rho,u,theta}(v) = rho (2 pi theta)^{-N/2} exp(-|v-u|^2 / (2 theta)).
struct MaxwellianParams {
  double rho = 1.0;
  std::vector<double> u;  // mean velocity; its length is the dimension
  double theta = 1.0;

  static MaxwellianParams centered(int dimension, double rho, double theta) {
    return MaxwellianParams{rho, std::vector<double>(dimension, 0.0), theta};
  }
  int dimension() const noexcept { return static_cast<int>(u.size()); }
  bool is_centered() const {
    for (double c : u)
      if (c != 0.0) return false;
    return true;
  }
};

namespace detail {
inline void check_maxwellian(const MaxwellianParams& p) {
  if (!(p.theta > 0.0) || !std::isfinite(p.theta))
    throw ContractViolation("Maxwellian: theta must be positive");
  if (!(p.rho > 0.0)) throw ContractViolation("Maxwellian: rho must be positive");
  if (p.dimension() < 1) throw ContractViolation("Maxwellian: empty mean velocity");
}
}  // namespace detail

inline double maxwellian_density(const MaxwellianParams& p, std::span<const double> v) {
  detail::check_maxwellian(p);
  if (static_cast<int>(v.size()) != p.dimension())
    throw ContractViolation("maxwellian_density: dimension mismatch");
  double r2 = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) r2 += (v[k] - p.u[k]) * (v[k] - p.u[k]);
  return p.rho * std::pow(2.0 * std::numbers::pi * p.theta, -0.5 * p.dimension()) *
         std::exp(-r2 / (2.0 * p.theta));
}

//! m_k = int M |v|^{2k} dv for a centered Maxwellian, by the Gamma-function formula
//! rho (2 theta)^k Gamma(k + N/2) / Gamma(N/2).
inline double radial_moment(const MaxwellianParams& p, double k) {
  detail::check_maxwellian(p);
  const int n = p.dimension();
  if (!(2.0 * k > -n)) throw ContractViolation("radial_moment: requires 2k > -N");
  if (!p.is_centered()) throw ContractViolation("radial_moment: requires a centered Maxwellian");
  return p.rho * std::pow(2.0 * p.theta, k) *
         std::exp(std::lgamma(k + 0.5 * n) - std::lgamma(0.5 * n));
}

namespace detail {

//! int_0^R f(r) r^{N-1} exp(-r^2/(2 theta)) dr |S^{N-1}| (2 pi theta)^{-N/2}:
//! the unit-mass centered Maxwellian average of a radial function. R is chosen
//! from the Gaussian tail, then doubled once to confirm convergence.
template <class F>
double maxwellian_radial_average(int n, double theta, double growth_power, F&& f,
                                 double lower = 0.0, double upper = -1.0) {
  using boost::math::quadrature::gauss_kronrod;
  const double norm = sphere_area(n) * std::pow(2.0 * std::numbers::pi * theta, -0.5 * n);
  auto integrand = [&](double r) {
    return f(r) * std::pow(r, n - 1) * std::exp(-r * r / (2.0 * theta));
  };
  if (upper >= 0.0) {
    double error = 0.0;
    const double value = gauss_kronrod<double, 61>::integrate(integrand, lower, upper, 20, 1e-14, &error);
    return norm * value;
  }
  const double k = std::max(0.0, growth_power);
  const double cutoff = std::sqrt(2.0 * theta) * std::sqrt(40.0 + k * std::log(40.0));
  const double start = std::max(lower, 0.0);
  double err1 = 0.0, err2 = 0.0;
  const double first = gauss_kronrod<double, 61>::integrate(integrand, start, std::max(cutoff, start), 20, 1e-14, &err1);
  const double second = gauss_kronrod<double, 61>::integrate(integrand, start, std::max(2.0 * cutoff, start), 20, 1e-14, &err2);
  const double scale = std::max(std::abs(second), 1e-300);
  if (std::abs(second - first) > 1e-12 * scale || err2 > 1e-11 * scale)
    throw NumericalError("radial quadrature did not converge", std::max(std::abs(second - first), err2));
  return norm * second;
}

}  // namespace detail

//! The same moment as radial_moment, by one-dimensional adaptive quadrature.
inline double radial_moment_quadrature(const MaxwellianParams& p, double k) {
  detail::check_maxwellian(p);
  if (!(2.0 * k > -p.dimension())) throw ContractViolation("radial_moment_quadrature: requires 2k > -N");
  if (!p.is_centered()) throw ContractViolation("radial_moment_quadrature: requires a centered Maxwellian");
  return p.rho * detail::maxwellian_radial_average(p.dimension(), p.theta, k,
                                                   [k](double r) { return std::pow(r, 2.0 * k); });
}

//! Double integral of M M_* |v - v_*|^3.
//!
//! With x = (v+v_*)/sqrt2, y = (v-v_*)/sqrt2 the pair density factorises into
//! two unit Maxwellians and the integral reduces to 2^{3/2} rho^2 int m |y|^3 dy,
//! evaluated by radial quadrature.
inline double pair_moment_u3(const MaxwellianParams& p) {
  detail::check_maxwellian(p);
  const double radial = detail::maxwellian_radial_average(p.dimension(), p.theta, 1.5,
                                                          [](double r) { return r * r * r; });
  return 2.0 * std::numbers::sqrt2 * p.rho * p.rho * radial;
}

//! Double integral of M M_* |v|^2 |v - v_*|^3 for a centered Maxwellian.
//!
//! Same change of variables: |v|^2 = |x+y|^2/2 averages over x to
//! (N theta + |y|^2)/2, leaving sqrt2 rho^2 [N theta m_{3/2} + m_{5/2}].
inline double pair_moment_v2u3(const MaxwellianParams& p) {
  detail::check_maxwellian(p);
  if (!p.is_centered()) throw ContractViolation("pair_moment_v2u3: requires a centered Maxwellian");
  const int n = p.dimension();
  const double theta = p.theta;
  const double radial = detail::maxwellian_radial_average(n, theta, 2.5, [n, theta](double r) {
    const double r3 = r * r * r;
    return (n * theta + r * r) * r3;
  });
  return std::numbers::sqrt2 * p.rho * p.rho * radial;
}

//! Brute-force oracle for int int M M_* |v|^{2 v_power} |v-v_*|^3: nested
//! quadrature over |v|, |v_*| and their relative angle (no change of variables).
inline double pair_moment_direct(const MaxwellianParams& p, double v_power) {
  using boost::math::quadrature::gauss_kronrod;
  detail::check_maxwellian(p);
  if (!p.is_centered()) throw ContractViolation("pair_moment_direct: requires a centered Maxwellian");
  const int n = p.dimension();
  const double theta = p.theta;
  const double density0 = p.rho * std::pow(2.0 * std::numbers::pi * theta, -0.5 * n);
  const double cutoff = std::sqrt(2.0 * theta) * std::sqrt(40.0 + (v_power + 2.0) * std::log(40.0));
  const double outer_area = sphere_area(n) * sphere_area(n - 1);
  auto radial = [&](double r) { return std::pow(r, n - 1) * std::exp(-r * r / (2.0 * theta)); };
  auto over_r = [&](double r) {
    auto over_s = [&](double s) {
      auto over_angle = [&](double phi) {
        const double u2 = std::max(0.0, r * r + s * s - 2.0 * r * s * std::cos(phi));
        const double jac = (n == 2) ? 1.0 : std::pow(std::sin(phi), n - 2);
        return u2 * std::sqrt(u2) * jac;
      };
      const double angular =
          gauss_kronrod<double, 31>::integrate(over_angle, 0.0, std::numbers::pi, 12, 1e-13);
      return radial(s) * angular;
    };
    const double inner = gauss_kronrod<double, 31>::integrate(over_s, 0.0, cutoff, 12, 1e-13);
    return radial(r) * std::pow(r, 2.0 * v_power) * inner;
  };
  const double value = gauss_kronrod<double, 31>::integrate(over_r, 0.0, cutoff, 12, 1e-13);
  return outer_area * density0 * density0 * value;
}

//! Constants of the quasi-elastic limit for a given cross-section, dimension and mass.
struct TheoryConstants {
  int dimension = 3;
  double rho = 1.0;
  double b1 = 0.0;
  double theta_bar_1 = 0.0;  //!< temperature of the limiting Maxwellian
  double E_bar_1 = 0.0;      //!< rho N theta_bar_1
  double k1 = 0.0;           //!< rho^2 N
  double k2 = 0.0;           //!< 2^{3/2} rho^2 b1 m_{3/2}(M_{1,0,1})
  double c0 = 0.0;           //!< normaliser of the first-order eigenfunction
};

namespace detail {
//! 1 / int | |v|^2 - N theta | <v>^2 M_{rho,0,theta}, split at the sign change.
inline double eigenfunction_normaliser(int n, double rho, double theta) {
  const double split = std::sqrt(n * theta);
  auto integrand = [n, theta](double r) { return std::abs(r * r - n * theta) * (1.0 + r * r); };
  const double inner = maxwellian_radial_average(n, theta, 2.0, integrand, 0.0, split);
  const double outer = maxwellian_radial_average(n, theta, 2.0, integrand, split);
  return 1.0 / (rho * (inner + outer));
}
}  // namespace detail

//! theta_bar_1 = N^2 / (8 b1^2) * m_{3/2}(M_{1,0,1})^{-2}, with k1, k2 and c0.
inline TheoryConstants quasi_elastic_temperature(const AngularMoments& moments, int dimension,
                                                 double rho = 1.0) {
  if (!(moments.b1 > 0.0)) throw ContractViolation("quasi_elastic_temperature: b1 must be positive");
  if (!(rho > 0.0)) throw ContractViolation("quasi_elastic_temperature: rho must be positive");
  const auto unit = MaxwellianParams::centered(dimension, 1.0, 1.0);
  const double m32 = radial_moment(unit, 1.5);
  TheoryConstants tc;
  tc.dimension = dimension;
  tc.rho = rho;
  tc.b1 = moments.b1;
  tc.theta_bar_1 = dimension * dimension / (8.0 * moments.b1 * moments.b1 * m32 * m32);
  tc.E_bar_1 = rho * dimension * tc.theta_bar_1;
  tc.k1 = rho * rho * dimension;
  tc.k2 = 2.0 * std::numbers::sqrt2 * rho * rho * moments.b1 * m32;
  tc.c0 = detail::eigenfunction_normaliser(dimension, rho, tc.theta_bar_1);
  return tc;
}

//! Psi(theta) = k1 theta - k2 theta^{3/2}; vanishes at theta_bar_1.
inline double psi(double theta, const TheoryConstants& tc) {
  if (!(theta > 0.0)) throw ContractViolation("psi: theta must be positive");
  return tc.k1 * theta - tc.k2 * theta * std::sqrt(theta);
}

//! Energy balance of the first-order eigenfunction phi_1 = c0 (|v|^2 - N theta_bar_1) G_1.
struct EnergyEigenIdentity {
  double E_phi1 = 0.0;      //!< int phi_1 |v|^2, by quadrature
  double D_tilde = 0.0;     //!< b1 int int G_1 (phi_1)_* |u|^3, by quadrature
  double residual = 0.0;    //!< |2 rho E - 4 D + rho E|
  double c0 = 0.0;
  double E_phi1_closed = 0.0;   //!< 2 N c0 rho theta^2
  double D_tilde_closed = 0.0;  //!< (3/2) N c0 rho^2 theta^2
  //! mu / (1 - alpha) at first order, (2 rho E - 4 D) / E.
  double eigenvalue_slope = 0.0;
};

inline EnergyEigenIdentity energy_eigen_identity(const AngularMoments& moments,
                                                 const TheoryConstants& tc, double rho) {
  if (!(rho > 0.0)) throw ContractViolation("energy_eigen_identity: rho must be positive");
  const int n = tc.dimension;
  const double theta = tc.theta_bar_1;
  EnergyEigenIdentity out;
  out.c0 = detail::eigenfunction_normaliser(n, rho, theta);
  const double moment =
      detail::maxwellian_radial_average(n, theta, 2.0, [n, theta](double r) { return (r * r - n * theta) * r * r; });
  out.E_phi1 = out.c0 * rho * moment;
  const auto g1 = MaxwellianParams::centered(n, rho, theta);
  out.D_tilde = moments.b1 * out.c0 * (pair_moment_v2u3(g1) - n * theta * pair_moment_u3(g1));
  out.residual = std::abs(2.0 * rho * out.E_phi1 - 4.0 * out.D_tilde + rho * out.E_phi1);
  out.E_phi1_closed = 2.0 * n * out.c0 * rho * theta * theta;
  out.D_tilde_closed = 1.5 * n * out.c0 * rho * rho * theta * theta;
  out.eigenvalue_slope = (2.0 * rho * out.E_phi1 - 4.0 * out.D_tilde) / out.E_phi1;
  return out;
}

//! Dissipation functional D_E = b1 int int M M_* |u|^3 of a Maxwellian.
inline double maxwellian_dissipation(const MaxwellianParams& p, const AngularMoments& moments) {
  return moments.b1 * pair_moment_u3(p);
}

//! i.i.d. draws from M_{rho,u,theta}. With `zero_momentum` the sample mean is
//! removed before shifting by u, so the ensemble momentum is exactly rho*u.
inline ParticleEnsemble sample_maxwellian(const MaxwellianParams& p, std::size_t count,
                                          RandomStream& rng, bool zero_momentum = false) {
  detail::check_maxwellian(p);
  if (count < 2) throw ContractViolation("sample_maxwellian: count must be >= 2");
  const int n = p.dimension();
  const double scale = std::sqrt(p.theta);
  std::vector<double> velocities(count * n);
  for (double& c : velocities) c = scale * rng.normal();
  ParticleEnsemble ensemble(n, p.rho, std::move(velocities));
  if (zero_momentum) ensemble.remove_mean_velocity();
  auto data = ensemble.data();
  for (std::size_t i = 0; i < count; ++i)
    for (int k = 0; k < n; ++k) data[i * n + k] += p.u[k];
  return ensemble;
}

//! One row of the Gaussian self-test table.
struct IdentityCheck {
  std::string name;
  int dimension = 3;
  double rho = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_residual = 0.0;
  double tolerance = 1e-8;
  bool pass() const { return relative_residual <= tolerance; }
};

namespace detail {
inline IdentityCheck make_check(std::string name, int n, double rho, double lhs, double rhs,
                                double scale, double tol) {
  IdentityCheck c{std::move(name), n, rho, lhs, rhs, 0.0, tol};
  c.relative_residual = std::abs(lhs - rhs) / scale;
  return c;
}

inline AngularMoments unit_kernel_moments(int n) {
  if (n == 3) return angular_moments(CrossSection::hard_sphere(1.0));
  return angular_moments(CrossSection(n, Tabulated{{1.0, 1.0}}));
}
}  // namespace detail

//! Every closed-form Gaussian identity used by the solver, each side computed
//! independently: quadrature/nested quadrature against the Gamma-function closed form.
inline std::vector<IdentityCheck> gaussian_identity_checks(std::span<const int> dimensions,
                                                           std::span<const double> masses,
                                                           double tolerance = 1e-8) {
  std::vector<IdentityCheck> checks;
  for (int n : dimensions) {
    const auto moments = detail::unit_kernel_moments(n);
    for (double rho : masses) {
      const auto m = MaxwellianParams::centered(n, rho, 1.0);
      const auto unit = MaxwellianParams::centered(n, 1.0, 1.0);
      const double m32 = radial_moment(unit, 1.5);
      const double e2 = radial_moment_quadrature(m, 1.0);
      checks.push_back(detail::make_check("Mv2: int M|v|^2 = rho N", n, rho, e2, rho * n, rho * n, tolerance));
      const double e4 = radial_moment_quadrature(m, 2.0);
      checks.push_back(detail::make_check("Mv4: int M|v|^4 = rho N(N+2)", n, rho, e4,
                                          rho * n * (n + 2), rho * n * (n + 2), tolerance));
      const double u3 = pair_moment_direct(m, 0.0);
      const double u3_rhs = rho * rho * 2.0 * std::numbers::sqrt2 * m32;
      checks.push_back(detail::make_check("MMu3: iint MM*|u|^3 = 2^{3/2} rho^2 m_{3/2}", n, rho, u3,
                                          u3_rhs, u3_rhs, tolerance));
      const double v2u3 = pair_moment_direct(m, 1.0);
      const double v2u3_rhs = rho * rho * std::numbers::sqrt2 * (2 * n + 3) * m32;
      checks.push_back(detail::make_check("MMv2u3: iint MM*|v|^2|u|^3 = sqrt2(2N+3) rho^2 m_{3/2}", n,
                                          rho, v2u3, v2u3_rhs, v2u3_rhs, tolerance));
      const auto tc = quasi_elastic_temperature(moments, n, rho);
      const double psi_root = psi(tc.theta_bar_1, tc);
      checks.push_back(detail::make_check("Psi(theta_bar_1) = 0", n, rho, psi_root, 0.0,
                                          tc.k1 * tc.theta_bar_1, tolerance));
      const auto g1 = MaxwellianParams::centered(n, rho, tc.theta_bar_1);
      const double fixed_lhs = rho * radial_moment_quadrature(g1, 1.0);
      const double fixed_rhs = maxwellian_dissipation(g1, moments);
      checks.push_back(detail::make_check("rho E(G1) = D_E(G1)", n, rho, fixed_lhs, fixed_rhs,
                                          fixed_lhs, tolerance));
      const auto eig = energy_eigen_identity(moments, tc, rho);
      checks.push_back(detail::make_check("2 rho E(phi1) - 4 D(G1,phi1) + rho E(phi1) = 0", n, rho,
                                          2.0 * rho * eig.E_phi1 - 4.0 * eig.D_tilde,
                                          -rho * eig.E_phi1, rho * eig.E_phi1, tolerance));
      checks.push_back(detail::make_check("E(phi1) = 2 N c0 rho theta^2", n, rho, eig.E_phi1,
                                          eig.E_phi1_closed, eig.E_phi1_closed, tolerance));
      checks.push_back(detail::make_check("D(G1,phi1) = (3/2) N c0 rho^2 theta^2", n, rho, eig.D_tilde,
                                          eig.D_tilde_closed, eig.D_tilde_closed, tolerance));
    }
  }
  return checks;
}

}  // namespace gk
