// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file ensemble.hpp
//! Read-only diagnostics of a particle ensemble: moments, radial histograms,
//! the energy-dissipation estimator, relative entropy and weighted L1 distances.
#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "gaussian.hpp"
#include "kernel.hpp"
#include "particle_ensemble.hpp"
#include "rng.hpp"

namespace gk {

//! Weighted empirical moments. m_k = (rho/n) sum |v_i|^{2k} for k in {1/2, 3/2, 2, 3}.
struct EnsembleMoments {
  double rho = 0.0;
  std::vector<double> momentum;
  double energy = 0.0;  //!< int f |v|^2
  double theta = 0.0;   //!< energy / (rho N)
  double centered_theta = 0.0;  //!< int f |v - u|^2 / (rho N)
  double m_half = 0.0;
  double m_32 = 0.0;
  double m_2 = 0.0;
  double m_3 = 0.0;

  std::vector<double> mean_velocity() const {
    std::vector<double> u(momentum);
    for (double& c : u) c /= rho;
    return u;
  }
};

inline EnsembleMoments moments(const ParticleEnsemble& e) {
  const int n = e.dimension();
  const std::size_t count = e.size();
  const auto data = e.data();
  EnsembleMoments m;
  m.rho = e.rho();
  std::vector<double> sum_v(n, 0.0);
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s6 = 0;
  for (std::size_t i = 0; i < count; ++i) {
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double c = data[i * n + k];
      sum_v[k] += c;
      r2 += c * c;
    }
    const double r = std::sqrt(r2);
    s1 += r;
    s2 += r2;
    s3 += r2 * r;
    s4 += r2 * r2;
    s6 += r2 * r2 * r2;
  }
  const double w = e.weight();
  m.momentum.resize(n);
  double u2 = 0.0;
  for (int k = 0; k < n; ++k) {
    m.momentum[k] = w * sum_v[k];
    const double u = sum_v[k] / static_cast<double>(count);
    u2 += u * u;
  }
  m.energy = w * s2;
  m.theta = m.energy / (m.rho * n);
  m.centered_theta = std::max(0.0, (m.energy - m.rho * u2) / (m.rho * n));
  m.m_half = w * s1;
  m.m_32 = w * s3;
  m.m_2 = w * s4;
  m.m_3 = w * s6;
  return m;
}

//! (rho/n) sum |v_i|^{2k} for arbitrary k.
inline double empirical_moment(const ParticleEnsemble& e, double k) {
  const int n = e.dimension();
  const auto data = e.data();
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double r2 = 0.0;
    for (int c = 0; c < n; ++c) r2 += data[i * n + c] * data[i * n + c];
    s += std::pow(r2, k);
  }
  return e.weight() * s;
}

//! Mean and standard error of a Monte Carlo estimate.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

//! Unbiased estimate of D_E = b1 int int f f_* |u|^3: b1 rho^2 times the mean of
//! |v_i - v_j|^3 over `pair_samples` uniformly drawn pairs i != j.
inline Estimate energy_dissipation_estimate(const ParticleEnsemble& e, const AngularMoments& moments,
                                            std::size_t pair_samples, RandomStream& rng) {
  if (pair_samples < 100) throw ContractViolation("energy_dissipation_estimate: pair_samples must be >= 100");
  const int n = e.dimension();
  const std::size_t count = e.size();
  const auto data = e.data();
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t s = 0; s < pair_samples; ++s) {
    const std::size_t i = rng.index(count);
    std::size_t j = rng.index(count - 1);
    if (j >= i) ++j;
    double u2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double d = data[i * n + k] - data[j * n + k];
      u2 += d * d;
    }
    const double u3 = u2 * std::sqrt(u2);
    sum += u3;
    sum2 += u3 * u3;
  }
  const double ns = static_cast<double>(pair_samples);
  const double mean = sum / ns;
  const double var = std::max(0.0, (sum2 - ns * mean * mean) / (ns - 1.0));
  const double factor = moments.b1 * e.rho() * e.rho();
  return {factor * mean, factor * std::sqrt(var / ns)};
}

//! The full pair average b1 rho^2 mean_{i<j} |v_i - v_j|^3. O(n^2).
inline double energy_dissipation_exact(const ParticleEnsemble& e, const AngularMoments& moments) {
  const int n = e.dimension();
  const std::size_t count = e.size();
  const auto data = e.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      double u2 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double d = data[i * n + k] - data[j * n + k];
        u2 += d * d;
      }
      sum += u2 * std::sqrt(u2);
    }
  }
  const double pairs = 0.5 * static_cast<double>(count) * static_cast<double>(count - 1);
  return moments.b1 * e.rho() * e.rho() * sum / pairs;
}

//! Partition of velocity space into spherical shells |v - center| in [edges[b], edges[b+1]).
//! The last edge is +infinity.
struct RadialBinning {
  std::vector<double> center;
  std::vector<double> edges;

  //! Shells of equal mass under M_{1,center,theta}: edges at sqrt(theta * chi2_N quantiles).
  static RadialBinning equal_probability(int dimension, double theta, int bins,
                                         std::vector<double> center = {}) {
    if (dimension < 1) throw ContractViolation("RadialBinning: dimension must be >= 1");
    if (bins < 2) throw ContractViolation("RadialBinning: need at least two bins");
    if (!(theta > 0.0) || !std::isfinite(theta)) throw ContractViolation("RadialBinning: theta must be positive");
    if (center.empty()) center.assign(dimension, 0.0);
    if (static_cast<int>(center.size()) != dimension)
      throw ContractViolation("RadialBinning: center dimension mismatch");
    const boost::math::chi_squared dist(dimension);
    RadialBinning b;
    b.center = std::move(center);
    b.edges.resize(bins + 1);
    b.edges[0] = 0.0;
    for (int i = 1; i < bins; ++i)
      b.edges[i] = std::sqrt(theta * boost::math::quantile(dist, static_cast<double>(i) / bins));
    b.edges[bins] = std::numeric_limits<double>::infinity();
    return b;
  }

  int dimension() const noexcept { return static_cast<int>(center.size()); }
  int bins() const noexcept { return static_cast<int>(edges.size()) - 1; }

  int locate(double r) const {
    const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, r);
    return static_cast<int>(it - edges.begin()) - 1;
  }

  double radius(std::span<const double> v) const {
    double r2 = 0.0;
    for (std::size_t k = 0; k < center.size(); ++k) r2 += (v[k] - center[k]) * (v[k] - center[k]);
    return std::sqrt(r2);
  }
};

namespace detail {
inline double weight_factor(std::span<const double> v, int weight_power) {
  if (weight_power == 0) return 1.0;
  double r2 = 0.0;
  for (double c : v) r2 += c * c;
  return 1.0 + r2;
}

inline void check_weight_power(int weight_power) {
  if (weight_power != 0 && weight_power != 2)
    throw ContractViolation("weight_power must be 0 or 2");
}
}  // namespace detail

//! Mass of each shell, optionally weighted by <v>^2 = 1 + |v|^2.
struct RadialHistogram {
  std::vector<double> bin_edges;
  std::vector<double> bin_masses;
  double total_mass = 0.0;
};

inline RadialHistogram radial_histogram(const ParticleEnsemble& e, const RadialBinning& binning,
                                        int weight_power = 0) {
  detail::check_weight_power(weight_power);
  if (e.dimension() != binning.dimension()) throw ContractViolation("radial_histogram: dimension mismatch");
  RadialHistogram h;
  h.bin_edges = binning.edges;
  h.bin_masses.assign(binning.bins(), 0.0);
  const double w = e.weight();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto v = e.velocity(i);
    h.bin_masses[binning.locate(binning.radius(v))] += w * detail::weight_factor(v, weight_power);
  }
  for (double m : h.bin_masses) h.total_mass += m;
  return h;
}

//! Running average of histograms on a common binning.
class HistogramAccumulator {
 public:
  explicit HistogramAccumulator(RadialBinning binning, int weight_power = 0)
      : binning_(std::move(binning)), weight_power_(weight_power), sum_(binning_.bins(), 0.0) {
    detail::check_weight_power(weight_power);
  }

  void add(const ParticleEnsemble& e) {
    const auto h = radial_histogram(e, binning_, weight_power_);
    for (std::size_t b = 0; b < sum_.size(); ++b) sum_[b] += h.bin_masses[b];
    ++snapshots_;
    samples_ += e.size();
  }

  void merge(const HistogramAccumulator& other) {
    if (other.sum_.size() != sum_.size()) throw ContractViolation("HistogramAccumulator: binning mismatch");
    for (std::size_t b = 0; b < sum_.size(); ++b) sum_[b] += other.sum_[b];
    snapshots_ += other.snapshots_;
    samples_ += other.samples_;
  }

  std::vector<double> mean_masses() const {
    if (snapshots_ == 0) throw ContractViolation("HistogramAccumulator: empty");
    std::vector<double> m(sum_);
    for (double& x : m) x /= static_cast<double>(snapshots_);
    return m;
  }

  const RadialBinning& binning() const noexcept { return binning_; }
  int weight_power() const noexcept { return weight_power_; }
  std::size_t snapshots() const noexcept { return snapshots_; }
  //! Total number of particle velocities pooled.
  std::size_t samples() const noexcept { return samples_; }

 private:
  RadialBinning binning_;
  int weight_power_;
  std::vector<double> sum_;
  std::size_t snapshots_ = 0;
  std::size_t samples_ = 0;
};

//! Shell masses of M_{rho,u,theta} with u equal to the binning center, optionally
//! weighted by 1 + |v|^2. Closed form through chi-squared distribution functions.
inline std::vector<double> maxwellian_bin_masses(const MaxwellianParams& ref, const RadialBinning& binning,
                                                 int weight_power = 0) {
  detail::check_weight_power(weight_power);
  detail::check_maxwellian(ref);
  const int n = ref.dimension();
  if (n != binning.dimension()) throw ContractViolation("maxwellian_bin_masses: dimension mismatch");
  for (int k = 0; k < n; ++k)
    if (std::abs(ref.u[k] - binning.center[k]) > 1e-12 * (1.0 + std::abs(ref.u[k])))
      throw ContractViolation("maxwellian_bin_masses: reference mean must equal the binning center");
  const boost::math::chi_squared chi_n(n), chi_n2(n + 2);
  double c2 = 0.0;
  for (double c : binning.center) c2 += c * c;
  auto cdf = [](const boost::math::chi_squared& d, double x) {
    return std::isinf(x) ? 1.0 : boost::math::cdf(d, x);
  };
  std::vector<double> masses(binning.bins());
  for (int b = 0; b < binning.bins(); ++b) {
    const double lo = binning.edges[b] * binning.edges[b] / ref.theta;
    const double hi = binning.edges[b + 1] * binning.edges[b + 1] / ref.theta;
    const double p = cdf(chi_n, hi) - cdf(chi_n, lo);
    masses[b] = ref.rho * p;
    if (weight_power == 2) {
      const double q = cdf(chi_n2, hi) - cdf(chi_n2, lo);
      masses[b] = ref.rho * ((1.0 + c2) * p + n * ref.theta * q);
    }
  }
  return masses;
}

//! Shell masses of an isotropic density given as a function of |v - center|, by quadrature.
inline std::vector<double> radial_reference_bin_masses(const std::function<double(double)>& density,
                                                       const RadialBinning& binning, int weight_power = 0) {
  using boost::math::quadrature::gauss_kronrod;
  detail::check_weight_power(weight_power);
  const int n = binning.dimension();
  double c2 = 0.0;
  for (double c : binning.center) c2 += c * c;
  const double area = sphere_area(n);
  auto integrand = [&](double r) {
    const double w = weight_power == 2 ? 1.0 + c2 + r * r : 1.0;
    return area * std::pow(r, n - 1) * density(r) * w;
  };
  std::vector<double> masses(binning.bins());
  for (int b = 0; b < binning.bins(); ++b) {
    const double hi = binning.edges[b + 1];
    masses[b] = gauss_kronrod<double, 61>::integrate(integrand, binning.edges[b], hi, 15, 1e-12);
  }
  return masses;
}

//! sum |a_b - b_b| over a common partition.
inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("l1_distance: bin count mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

//! Radial-histogram approximation of int |g - M| <v>^p for a Maxwellian reference.
//! Binning: equal probability under the reference.
inline double l1_distance(const ParticleEnsemble& e, const MaxwellianParams& ref, int weight_power,
                          int bins = 64) {
  const auto binning = RadialBinning::equal_probability(ref.dimension(), ref.theta, bins, ref.u);
  const auto h = radial_histogram(e, binning, weight_power);
  return l1_distance(h.bin_masses, maxwellian_bin_masses(ref, binning, weight_power));
}

//! The same against an arbitrary isotropic density on a supplied binning.
inline double l1_distance(const ParticleEnsemble& e, const std::function<double(double)>& density,
                          const RadialBinning& binning, int weight_power) {
  const auto h = radial_histogram(e, binning, weight_power);
  return l1_distance(h.bin_masses, radial_reference_bin_masses(density, binning, weight_power));
}

//! Two ensembles on a common binning.
inline double l1_distance(const ParticleEnsemble& a, const ParticleEnsemble& b, const RadialBinning& binning,
                          int weight_power) {
  return l1_distance(radial_histogram(a, binning, weight_power).bin_masses,
                     radial_histogram(b, binning, weight_power).bin_masses);
}

//! The Maxwellian M[g] with the mass, mean velocity and temperature of the ensemble.
inline MaxwellianParams matched_maxwellian(const ParticleEnsemble& e) {
  const auto m = moments(e);
  if (!(m.centered_theta > 0.0)) throw ContractViolation("matched_maxwellian: degenerate ensemble");
  return MaxwellianParams{m.rho, m.mean_velocity(), m.centered_theta};
}

//! Plug-in sum m_b ln(m_b / q_b) over shells, empty bins skipped, clamped at zero.
inline double relative_entropy(std::span<const double> masses, std::span<const double> reference) {
  if (masses.size() != reference.size()) throw ContractViolation("relative_entropy: bin count mismatch");
  double h = 0.0;
  for (std::size_t b = 0; b < masses.size(); ++b)
    if (masses[b] > 0.0) h += masses[b] * std::log(masses[b] / reference[b]);
  return std::max(0.0, h);
}

//! Estimate of H(g | ref) on shells about ref.u of equal probability under the
//! Maxwellian with the sample's own spread about ref.u, so the shells follow the data.
inline double relative_entropy_estimate(const ParticleEnsemble& e, const MaxwellianParams& ref, int bins = 64) {
  detail::check_maxwellian(ref);
  const int n = ref.dimension();
  if (e.dimension() != n) throw ContractViolation("relative_entropy_estimate: dimension mismatch");
  const auto data = e.data();
  double spread = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < n; ++k) {
      const double c = data[i * n + k] - ref.u[k];
      spread += c * c;
    }
  spread /= static_cast<double>(e.size()) * n;
  const auto binning = RadialBinning::equal_probability(n, spread > 0.0 ? spread : ref.theta, bins, ref.u);
  return relative_entropy(radial_histogram(e, binning).bin_masses, maxwellian_bin_masses(ref, binning));
}

//! Estimate of H(g | M[g]).
inline double relative_entropy_estimate(const ParticleEnsemble& e, int bins = 64) {
  return relative_entropy_estimate(e, matched_maxwellian(e), bins);
}

//! Shell masses of `count` i.i.d. draws from `ref`, normalised to total mass ref.rho.
//! Streams the draws, so `count` is not limited by memory.
inline std::vector<double> sampled_bin_masses(const MaxwellianParams& ref, const RadialBinning& binning,
                                              int weight_power, std::size_t count, RandomStream& rng) {
  detail::check_weight_power(weight_power);
  detail::check_maxwellian(ref);
  const int n = ref.dimension();
  const double s = std::sqrt(ref.theta);
  std::vector<double> masses(binning.bins(), 0.0);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < count; ++i) {
    for (int k = 0; k < n; ++k) v[k] = ref.u[k] + s * rng.normal();
    masses[binning.locate(binning.radius(v))] += detail::weight_factor(v, weight_power);
  }
  for (double& m : masses) m *= ref.rho / static_cast<double>(count);
  return masses;
}

//! Literal energy bounds E <= 4 rho / b1^2 and E >= N alpha^4 rho / 8, with margins.
//! `lower_bound_kernel_scaled` = N^2 alpha^4 rho / (8 b2^2) is reported for
//! comparison only; it is the lower bound with the cross-section scaling kept.
struct EnergyBounds {
  double energy = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double lower_bound_kernel_scaled = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
  double lower_margin = 0.0;
  double upper_margin = 0.0;
};

inline EnergyBounds energy_bounds(double energy, int dimension, double rho, double alpha,
                                  const AngularMoments& moments) {
  EnergyBounds b;
  b.energy = energy;
  const double a4 = alpha * alpha * alpha * alpha;
  b.lower_bound = dimension * a4 * rho / 8.0;
  b.upper_bound = 4.0 * rho / (moments.b1 * moments.b1);
  b.lower_bound_kernel_scaled = dimension * dimension * a4 * rho / (8.0 * moments.b2 * moments.b2);
  b.lower_margin = energy - b.lower_bound;
  b.upper_margin = b.upper_bound - energy;
  b.lower_ok = b.lower_margin >= 0.0;
  b.upper_ok = b.upper_margin >= 0.0;
  return b;
}

inline EnergyBounds energy_bounds_check(const ParticleEnsemble& e, double alpha, const AngularMoments& angular) {
  return energy_bounds(moments(e).energy, e.dimension(), e.rho(), alpha, angular);
}

//! Smallest X with m_k / rho <= Gamma(k + 1/2) X^k for k in {1, 3/2, 2, 3}, and
//! the per-order values X_k = (m_k / (rho Gamma(k + 1/2)))^{1/k}.
struct PovznerEnvelope {
  static constexpr std::array<double, 4> kOrders{1.0, 1.5, 2.0, 3.0};
  double x = 0.0;
  std::array<double, 4> x_k{};
};

inline PovznerEnvelope povzner_envelope(const ParticleEnsemble& e) {
  PovznerEnvelope p;
  for (std::size_t i = 0; i < p.kOrders.size(); ++i) {
    const double k = p.kOrders[i];
    p.x_k[i] = std::pow(empirical_moment(e, k) / (e.rho() * std::tgamma(k + 0.5)), 1.0 / k);
    p.x = std::max(p.x, p.x_k[i]);
  }
  return p;
}

//! One row of diagnostics output.
struct DiagnosticsRecord {
  double t = 0.0;
  double rho = 0.0;
  std::vector<double> momentum;
  double energy = 0.0;
  double theta = 0.0;
  double m_half = 0.0;
  double m_32 = 0.0;
  double m_2 = 0.0;
  double m_3 = 0.0;
  double de_est = 0.0;
  double de_se = 0.0;
  double rel_entropy = 0.0;
  double l1_dist = 0.0;
  std::uint64_t collisions = 0;
  std::uint64_t replica = 0;
};

struct DiagnosticsOptions {
  std::size_t pair_samples = 20000;
  int bins = 64;
  //! Reference of the L1_2 column; the matched Maxwellian when empty.
  std::optional<MaxwellianParams> l1_reference;
  int l1_weight_power = 2;
};

inline DiagnosticsRecord make_diagnostics(const ParticleEnsemble& e, const AngularMoments& angular, double t,
                                          std::uint64_t collisions, std::uint64_t replica,
                                          const DiagnosticsOptions& options, RandomStream& rng) {
  const auto m = moments(e);
  DiagnosticsRecord r;
  r.t = t;
  r.rho = m.rho;
  r.momentum = m.momentum;
  r.energy = m.energy;
  r.theta = m.theta;
  r.m_half = m.m_half;
  r.m_32 = m.m_32;
  r.m_2 = m.m_2;
  r.m_3 = m.m_3;
  const auto de = energy_dissipation_estimate(e, angular, options.pair_samples, rng);
  r.de_est = de.value;
  r.de_se = de.std_error;
  const MaxwellianParams matched{m.rho, m.mean_velocity(), m.centered_theta};
  r.rel_entropy = relative_entropy_estimate(e, matched, options.bins);
  r.l1_dist = l1_distance(e, options.l1_reference ? *options.l1_reference : matched, options.l1_weight_power,
                          options.bins);
  r.collisions = collisions;
  r.replica = replica;
  return r;
}

}  // namespace gk
