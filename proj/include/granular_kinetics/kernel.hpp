// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file kernel.hpp
//! Inelastic collision kinematics and cross-section geometry.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace gk {

//! Surface area of the unit sphere S^{n-1} embedded in R^n.
inline double sphere_area(int n) {
  detail::expect(n >= 1, "sphere_area: dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

//! Constant hard-sphere kernel b(x) = b'_0, valid in three dimensions.
struct HardSphereConstant {
  double b0_prime = 1.0;
};

//! b(x) sampled on a uniform grid over [-1, 1], interpolated piecewise-linearly.
struct Tabulated {
  std::vector<double> values;
};

//! Angular part b(u_hat . sigma) of the collision kernel.
class CrossSection {
 public:
  using Form = std::variant<HardSphereConstant, Tabulated>;

  CrossSection(int dimension, Form form) : dimension_(dimension), form_(std::move(form)) {
    if (dimension_ < 2) throw ContractViolation("CrossSection: dimension must be >= 2");
    if (const auto* hs = std::get_if<HardSphereConstant>(&form_)) {
      if (dimension_ != 3)
        throw ContractViolation("CrossSection: constant hard-sphere kernel requires dimension 3");
      if (!(hs->b0_prime > 0.0) || !std::isfinite(hs->b0_prime))
        throw ContractViolation("CrossSection: b0_prime must be positive");
      b_min_ = b_max_ = hs->b0_prime;
      constant_ = true;
    } else {
      const auto& values = std::get<Tabulated>(form_).values;
      if (values.size() < 2) throw ContractViolation("CrossSection: table needs >= 2 samples");
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
          throw ContractViolation("CrossSection: tabulated b must be positive and finite");
        if (i > 0 && values[i] < values[i - 1])
          throw ContractViolation("CrossSection: tabulated b must be non-decreasing");
      }
      b_min_ = values.front();
      b_max_ = values.back();
      constant_ = (b_min_ == b_max_);
    }
  }

  static CrossSection hard_sphere(double b0_prime = 1.0) {
    return CrossSection(3, HardSphereConstant{b0_prime});
  }

  int dimension() const noexcept { return dimension_; }
  const Form& form() const noexcept { return form_; }
  double min_value() const noexcept { return b_min_; }
  double max_value() const noexcept { return b_max_; }
  //! True when b does not depend on the deflection angle.
  bool is_constant() const noexcept { return constant_; }

  //! b(x) for x = u_hat . sigma in [-1, 1].
  double operator()(double x) const {
    if (const auto* hs = std::get_if<HardSphereConstant>(&form_)) return hs->b0_prime;
    const auto& values = std::get<Tabulated>(form_).values;
    const double position = (std::clamp(x, -1.0, 1.0) + 1.0) * 0.5 * (values.size() - 1);
    const auto cell = std::min(static_cast<std::size_t>(position), values.size() - 2);
    const double frac = position - static_cast<double>(cell);
    return values[cell] + frac * (values[cell + 1] - values[cell]);
  }

  //! Kernel multiplied by a positive constant.
  CrossSection scaled(double factor) const {
    detail::expect(factor > 0.0, "CrossSection::scaled: factor must be positive");
    if (const auto* hs = std::get_if<HardSphereConstant>(&form_))
      return CrossSection(dimension_, HardSphereConstant{hs->b0_prime * factor});
    auto values = std::get<Tabulated>(form_).values;
    for (double& v : values) v *= factor;
    return CrossSection(dimension_, Tabulated{std::move(values)});
  }

 private:
  int dimension_;
  Form form_;
  double b_min_ = 0.0;
  double b_max_ = 0.0;
  bool constant_ = false;
};

//! Integrals of b over the sphere.
//!
//! b0 = int b dsigma (loss-term rate), b1 = (1/8) int (1 - x) b dsigma (the
//! energy-dissipation weight), b2 = ||b||_{L^1(S^{N-1})}, which equals b0 for
//! positive b.
struct AngularMoments {
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
};

//! Normal restitution and the matching self-similar stretching rate.
struct RestitutionParams {
  double alpha = 1.0;
  double rho = 1.0;
  double tau_alpha = 0.0;

  static RestitutionParams make(double alpha, double rho) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw ContractViolation("RestitutionParams: alpha must lie in [0, 1]");
    if (!(rho > 0.0) || !std::isfinite(rho))
      throw ContractViolation("RestitutionParams: rho must be positive");
    return RestitutionParams{alpha, rho, rho * (1.0 - alpha)};
  }
};

namespace detail {

template <std::size_t Extent>
double dot(std::span<const double, Extent> a, std::span<const double, Extent> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm2(std::span<const double> a) { return dot<std::dynamic_extent>(a, a); }

//! Composite Simpson on [0, pi] in the polar angle; returns (value, error).
template <class F>
std::pair<double, double> polar_integral(F&& integrand, int intervals = 256) {
  auto simpson = [&](int m) {
    const double h = std::numbers::pi / m;
    double s = integrand(0.0) + integrand(std::numbers::pi);
    for (int i = 1; i < m; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
    return s * h / 3.0;
  };
  const double fine = simpson(intervals);
  const double coarse = simpson(intervals / 2);
  return {fine + (fine - coarse) / 15.0, std::abs(fine - coarse) / 15.0};
}

}  // namespace detail

//! Density of x = u_hat . sigma under d sigma, times b: b(x)|S^{N-2}|(1-x^2)^{(N-3)/2}.
//! Integrating it in the polar angle phi (x = cos phi) removes the endpoint
//! singularity present for N = 2.
inline double polar_weight(const CrossSection& cs, double phi) {
  const int n = cs.dimension();
  const double s = std::sin(phi);
  const double jac = (n == 2) ? 1.0 : std::pow(s, n - 2);
  return cs(std::cos(phi)) * sphere_area(n - 1) * jac;
}

//! b0, b1, b2 by exact formula (constant kernel) or 256-interval quadrature.
inline AngularMoments angular_moments(const CrossSection& cs, double rel_tolerance = 1e-6) {
  const int n = cs.dimension();
  if (const auto* hs = std::get_if<HardSphereConstant>(&cs.form())) {
    const double b0 = sphere_area(n) * hs->b0_prime;
    return AngularMoments{b0, b0 / 8.0, b0};
  }
  const auto [b0, err0] = detail::polar_integral([&](double phi) { return polar_weight(cs, phi); });
  const auto [c1, err1] = detail::polar_integral(
      [&](double phi) { return (1.0 - std::cos(phi)) * polar_weight(cs, phi); });
  if (err0 > rel_tolerance * b0) throw NumericalError("angular_moments: b0 quadrature", err0);
  if (err1 > rel_tolerance * c1) throw NumericalError("angular_moments: b1 quadrature", err1);
  return AngularMoments{b0, c1 / 8.0, b0};
}

//! Tolerance on |sigma| - 1 accepted by the collision routines.
inline constexpr double kUnitTolerance = 1e-12;

//! In-place inelastic collision; returns the energy change
//! -((1-alpha^2)/4)(1 - u_hat.sigma)|u|^2. Pairs with u = 0 are left unchanged.
template <std::size_t Extent>
double apply_collision(std::span<double, Extent> v, std::span<double, Extent> v_star,
                       std::span<const double, Extent> sigma, double alpha) noexcept {
  const std::size_t n = v.size();
  double u2 = 0.0, u_dot_sigma = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = v[k] - v_star[k];
    u2 += u * u;
    u_dot_sigma += u * sigma[k];
  }
  if (u2 == 0.0) return 0.0;
  const double speed = std::sqrt(u2);
  const double a = 0.5 * (1.0 - alpha);
  const double c = 0.5 * (1.0 + alpha) * speed;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = v[k] - v_star[k];
    const double half_w = 0.5 * (v[k] + v_star[k]);
    const double half_u_prime = 0.5 * (a * u + c * sigma[k]);
    v[k] = half_w + half_u_prime;
    v_star[k] = half_w - half_u_prime;
  }
  const double cos_angle = u_dot_sigma / speed;
  return -0.25 * (1.0 - alpha * alpha) * (1.0 - cos_angle) * u2;
}

namespace detail {
inline void check_collision_inputs(std::span<const double> v, std::span<const double> v_star,
                                   std::span<const double> sigma, double alpha) {
  if (v.size() != v_star.size() || v.size() != sigma.size() || v.size() < 2)
    throw ContractViolation("collision: velocity and sigma dimensions differ");
  if (std::abs(std::sqrt(norm2(sigma)) - 1.0) > kUnitTolerance)
    throw ContractViolation("collision: sigma must be a unit vector");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractViolation("collision: alpha must lie in [0, 1]");
}
}  // namespace detail

//! Post-collisional pair (v', v'_*).
inline std::pair<std::vector<double>, std::vector<double>> post_collision(
    std::span<const double> v, std::span<const double> v_star, std::span<const double> sigma,
    double alpha) {
  detail::check_collision_inputs(v, v_star, sigma, alpha);
  std::vector<double> v_prime(v.begin(), v.end());
  std::vector<double> v_star_prime(v_star.begin(), v_star.end());
  apply_collision<std::dynamic_extent>(v_prime, v_star_prime, sigma, alpha);
  return {std::move(v_prime), std::move(v_star_prime)};
}

//! |v'|^2 + |v'_*|^2 - |v|^2 - |v_*|^2 in closed form.
inline double collision_energy_delta(std::span<const double> v, std::span<const double> v_star,
                                     std::span<const double> sigma, double alpha) {
  detail::check_collision_inputs(v, v_star, sigma, alpha);
  double u2 = 0.0, u_dot_sigma = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double u = v[k] - v_star[k];
    u2 += u * u;
    u_dot_sigma += u * sigma[k];
  }
  if (u2 == 0.0) return 0.0;
  return -0.25 * (1.0 - alpha * alpha) * (1.0 - u_dot_sigma / std::sqrt(u2)) * u2;
}

//! Uniform point on S^{n-1}.
template <std::size_t Extent>
void uniform_on_sphere(std::span<double, Extent> out, RandomStream& rng) {
  const std::size_t n = out.size();
  if (n == 3) {
    const double z = 2.0 * rng.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out[0] = r * std::cos(phi);
    out[1] = r * std::sin(phi);
    out[2] = z;
    return;
  }
  if (n == 2) {
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    out[0] = std::cos(phi);
    out[1] = std::sin(phi);
    return;
  }
  double r2 = 0.0;
  do {
    r2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = rng.normal();
      r2 += out[k] * out[k];
    }
  } while (r2 == 0.0);
  const double inv = 1.0 / std::sqrt(r2);
  for (std::size_t k = 0; k < n; ++k) out[k] *= inv;
}

//! Cap on rejection iterations in sample_sigma.
inline constexpr int kSigmaRejectionCap = 10000;

//! Draws sigma with density b(u_hat . sigma)/b0 on S^{N-1}, writing into `out`.
//! Non-constant kernels use rejection against the uniform measure with bound b_M.
template <std::size_t Extent>
void sample_sigma_into(std::span<const double, Extent> u_hat, const CrossSection& cs,
                       RandomStream& rng, std::span<double, Extent> out) {
  uniform_on_sphere(out, rng);
  if (cs.is_constant()) return;
  const double bound = cs.max_value();
  for (int iteration = 0; iteration < kSigmaRejectionCap; ++iteration) {
    const double x = detail::dot<Extent>(u_hat, std::span<const double, Extent>(out));
    if (rng.uniform() * bound < cs(x)) return;
    uniform_on_sphere(out, rng);
  }
  throw SamplingError("sample_sigma: rejection loop exceeded its iteration cap");
}

inline std::vector<double> sample_sigma(std::span<const double> u_hat, const CrossSection& cs,
                                        RandomStream& rng) {
  if (static_cast<int>(u_hat.size()) != cs.dimension())
    throw ContractViolation("sample_sigma: u_hat dimension does not match the cross-section");
  if (std::abs(std::sqrt(detail::norm2(u_hat)) - 1.0) > kUnitTolerance)
    throw ContractViolation("sample_sigma: u_hat must be a unit vector");
  std::vector<double> sigma(u_hat.size());
  sample_sigma_into<std::dynamic_extent>(u_hat, cs, rng, sigma);
  return sigma;
}

}  // namespace gk
