// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file dsmc.hpp
//! Direct simulation Monte Carlo for the homogeneous inelastic Boltzmann
//! equation, in original (free cooling) and self-similar (rescaled) variables.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "ensemble.hpp"
#include "errors.hpp"
#include "kernel.hpp"
#include "particle_ensemble.hpp"
#include "rng.hpp"

namespace gk {

enum class Mode { kOriginal, kRescaled };

struct DsmcConfig {
  //! Time step; 0 selects it from collision_fraction and max_tau_dt.
  double dt = 0.0;
  //! Target per-particle collision probability per step when dt is automatic.
  double collision_fraction = 0.1;
  double max_collision_probability = 0.2;
  double max_tau_dt = 1e-3;
  //! Re-select the automatic dt at every majorant refresh.
  bool adaptive_dt = false;
  //! Relative-speed majorant; 0 estimates it and refreshes it periodically.
  double majorant_relvel = 0.0;
  double majorant_safety = 1.5;
  std::size_t majorant_samples = 4096;
  int majorant_refresh_interval = 50;
  std::uint64_t seed = 1;
  //! Stream coordinates: experiments give each stage its own phase.
  std::uint64_t phase = 0;
  std::uint64_t replica = 0;
  Mode mode = Mode::kRescaled;
  //! Rescaled mode only: remove the mean velocity. Collisions conserve momentum
  //! exactly, so this only clears rounding drift; it runs at every majorant refresh
  //! and before every diagnostics record.
  bool recenter_momentum = true;
};

//! Bookkeeping of one step. Energies are int f |v|^2. The identity
//! energy_after - energy_before = sum_of_deltas + stretch_delta + recenter_delta
//! holds to rounding; recenter_delta is non-zero only on steps that end with a
//! majorant refresh, where the energy is recomputed from the velocities and the
//! mean velocity is removed (rescaled mode).
struct StepStats {
  double dt = 0.0;
  std::uint64_t candidates = 0;
  std::uint64_t accepted = 0;
  std::uint64_t majorant_violations = 0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double sum_of_deltas = 0.0;
  double stretch_delta = 0.0;
  double recenter_delta = 0.0;
};

//! Called after each diagnostics record with the state it describes.
using RunObserver = std::function<void(const ParticleEnsemble&, const DiagnosticsRecord&)>;

inline constexpr int kMaxDsmcDimension = 16;

class DsmcSolver {
 public:
  DsmcSolver(ParticleEnsemble ensemble, DsmcConfig config, RestitutionParams restitution, CrossSection cross_section)
      : ensemble_(std::move(ensemble)),
        config_(config),
        restitution_(restitution),
        cross_section_(std::move(cross_section)),
        angular_(angular_moments(cross_section_)),
        rng_(config.seed, stream_id(StreamPurpose::kDynamics, config.phase, config.replica)),
        diagnostics_rng_(config.seed, stream_id(StreamPurpose::kDiagnostics, config.phase, config.replica)) {
    if (ensemble_.dimension() != cross_section_.dimension())
      throw ContractViolation("DsmcSolver: ensemble and cross-section dimensions differ");
    if (ensemble_.dimension() > kMaxDsmcDimension) throw ContractViolation("DsmcSolver: dimension too large");
    if (std::abs(restitution_.rho - ensemble_.rho()) > 1e-12 * ensemble_.rho())
      throw ContractViolation("DsmcSolver: restitution rho differs from the ensemble mass");
    if (config_.dt < 0.0 || !std::isfinite(config_.dt)) throw ConfigError("dt must be non-negative");
    if (!(config_.collision_fraction > 0.0) || config_.collision_fraction > config_.max_collision_probability)
      throw ConfigError("collision_fraction must lie in (0, max_collision_probability]");
    if (config_.majorant_relvel < 0.0) throw ConfigError("majorant_relvel must be non-negative");
    if (config_.majorant_refresh_interval < 1) throw ConfigError("majorant_refresh_interval must be >= 1");
    if (config_.majorant_samples < 16) throw ConfigError("majorant_samples must be >= 16");
    if (!(config_.majorant_safety >= 1.0)) throw ConfigError("majorant_safety must be >= 1");
    synchronise();
    refresh_majorant();
    if (config_.dt > 0.0) {
      dt_ = config_.dt;
      if (collision_probability(dt_) > config_.max_collision_probability)
        throw ConfigError("dt exceeds the per-particle collision probability limit");
      if (tau() * dt_ > config_.max_tau_dt) throw ConfigError("dt exceeds the tau_alpha * dt limit");
    } else {
      dt_ = automatic_dt();
    }
  }

  //! Current state. The self-similar stretch is applied lazily; this folds it in.
  const ParticleEnsemble& ensemble() const {
    materialize();
    return ensemble_;
  }
  const DsmcConfig& config() const noexcept { return config_; }
  const RestitutionParams& restitution() const noexcept { return restitution_; }
  const CrossSection& cross_section() const noexcept { return cross_section_; }
  const AngularMoments& angular() const noexcept { return angular_; }
  double time() const noexcept { return time_; }
  double dt() const noexcept { return dt_; }
  double majorant() const noexcept { return u_max_; }
  double mean_relative_speed() const noexcept { return mean_relvel_; }
  double energy() const noexcept { return energy_; }
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t collisions() const noexcept { return collisions_; }
  std::uint64_t candidates() const noexcept { return candidates_; }
  std::uint64_t majorant_violations() const noexcept { return violations_; }
  double tau() const noexcept { return config_.mode == Mode::kRescaled ? restitution_.tau_alpha : 0.0; }

  //! rho b0 <|u|> dt: expected number of collisions per particle in a step of length dt.
  double collision_probability(double dt) const { return ensemble_.rho() * angular_.b0 * mean_relvel_ * dt; }

  StepStats step() { return step(dt_); }

  StepStats step(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("step: dt must be positive");
    StepStats s;
    s.dt = dt;
    s.energy_before = energy_;
    const double n = static_cast<double>(ensemble_.size());
    const double expected = n * ensemble_.rho() * angular_.b0 * u_max_ * dt / 2.0;
    if (!std::isfinite(expected) || expected > 9.0e15) throw ConfigError("candidate pair count overflows");
    const double whole = std::floor(expected);
    s.candidates = static_cast<std::uint64_t>(whole) + (rng_.uniform() < expected - whole ? 1u : 0u);
    // Stored velocities are the physical ones divided by scale_.
    switch (ensemble_.dimension()) {
      case 2: collide<2>(s); break;
      case 3: collide<3>(s); break;
      default: collide<std::dynamic_extent>(s); break;
    }
    s.sum_of_deltas *= ensemble_.weight() * scale_ * scale_;
    const double after_collisions = s.energy_before + s.sum_of_deltas;
    energy_ = after_collisions;
    if (tau() > 0.0) {
      const double factor = std::exp(tau() * dt);
      scale_ *= factor;
      s.stretch_delta = (factor * factor - 1.0) * after_collisions;
      energy_ = factor * factor * after_collisions;
    }
    time_ += dt;
    ++steps_;
    collisions_ += s.accepted;
    candidates_ += s.candidates;
    violations_ += s.majorant_violations;
    if (steps_ % static_cast<std::uint64_t>(config_.majorant_refresh_interval) == 0) {
      const double before_sync = energy_;
      synchronise();
      s.recenter_delta = energy_ - before_sync;
      refresh_majorant();
      if (config_.adaptive_dt && config_.dt == 0.0) dt_ = automatic_dt();
    }
    s.energy_after = energy_;
    return s;
  }

  //! Advances through `schedule` (non-decreasing, not before time()), emitting one
  //! record per entry. Steps are shortened to land exactly on output times.
  std::vector<DiagnosticsRecord> run(std::span<const double> schedule, const DiagnosticsOptions& options,
                                     const RunObserver& observer = {}) {
    std::vector<DiagnosticsRecord> records;
    records.reserve(schedule.size());
    double previous = time_;
    for (double target : schedule) {
      if (!(target >= previous)) throw ContractViolation("run: schedule must be non-decreasing and not in the past");
      previous = target;
      advance_to(target);
      records.push_back(diagnostics(options));
      if (observer) observer(ensemble(), records.back());
    }
    return records;
  }

  void advance_to(double target) {
    while (target - time_ > 1e-12 * std::max(1.0, std::abs(target))) {
      const double remaining = target - time_;
      step(std::min(dt_, remaining));
    }
    time_ = std::max(time_, target);
  }

  DiagnosticsRecord diagnostics(const DiagnosticsOptions& options) {
    synchronise();
    return make_diagnostics(ensemble_, angular_, time_, collisions_, config_.replica, options, diagnostics_rng_);
  }

 private:
  //! Applies the pending stretch factor to the stored velocities.
  void materialize() const {
    if (scale_ != 1.0) {
      ensemble_.scale_velocities(scale_);
      scale_ = 1.0;
    }
  }

  //! Folds in the stretch, recentres in rescaled mode and recomputes the energy
  //! exactly. Between synchronisations energy_ is tracked from per-collision deltas;
  //! the difference found here is the recentring change plus accumulated rounding.
  void synchronise() {
    materialize();
    if (config_.mode == Mode::kRescaled && config_.recenter_momentum) ensemble_.remove_mean_velocity();
    double sum = 0.0;
    for (double c : ensemble_.data()) sum += c * c;
    energy_ = ensemble_.weight() * sum;
    if (!std::isfinite(energy_)) throw CorruptedStateError("non-finite velocity after a DSMC step");
  }

  template <std::size_t Extent>
  void collide(StepStats& s) {
    const int n = ensemble_.dimension();
    const std::size_t count = ensemble_.size();
    double* data = ensemble_.data().data();
    const double alpha = restitution_.alpha;
    const bool constant = cross_section_.is_constant();
    const double u_max = u_max_ / scale_;
    std::array<double, kMaxDsmcDimension> sigma_buf{}, u_hat_buf{};
    for (std::uint64_t c = 0; c < s.candidates; ++c) {
      const std::size_t i = rng_.index(count);
      std::size_t j = rng_.index(count - 1);
      if (j >= i) ++j;
      double* vi = data + i * n;
      double* vj = data + j * n;
      double u2 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double d = vi[k] - vj[k];
        u2 += d * d;
      }
      const double u = std::sqrt(u2);
      if (u > u_max) {
        ++s.majorant_violations;
      } else if (!(rng_.uniform() * u_max < u)) {
        continue;
      }
      ++s.accepted;
      std::span<double, Extent> sigma(sigma_buf.data(), n);
      if (constant) {
        uniform_on_sphere<Extent>(sigma, rng_);
      } else {
        std::span<double, Extent> u_hat(u_hat_buf.data(), n);
        if (u > 0.0) {
          for (int k = 0; k < n; ++k) u_hat[k] = (vi[k] - vj[k]) / u;
        } else {
          uniform_on_sphere<Extent>(u_hat, rng_);
        }
        sample_sigma_into<Extent>(std::span<const double, Extent>(u_hat), cross_section_, rng_, sigma);
      }
      s.sum_of_deltas += apply_collision<Extent>(std::span<double, Extent>(vi, n), std::span<double, Extent>(vj, n),
                                                 std::span<const double, Extent>(sigma), alpha);
    }
  }

  //! u_max = safety * max |u| over random pairs; also records the sample mean of |u|.
  void refresh_majorant() {
    const int n = ensemble_.dimension();
    const std::size_t count = ensemble_.size();
    const auto data = ensemble_.data();
    double max_u = 0.0, sum_u = 0.0;
    for (std::size_t s = 0; s < config_.majorant_samples; ++s) {
      const std::size_t i = rng_.index(count);
      std::size_t j = rng_.index(count - 1);
      if (j >= i) ++j;
      double u2 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double d = data[i * n + k] - data[j * n + k];
        u2 += d * d;
      }
      const double u = std::sqrt(u2);
      max_u = std::max(max_u, u);
      sum_u += u;
    }
    mean_relvel_ = sum_u / static_cast<double>(config_.majorant_samples);
    if (config_.majorant_relvel > 0.0) {
      u_max_ = config_.majorant_relvel;
    } else {
      u_max_ = config_.majorant_safety * max_u;
      if (!(u_max_ > 0.0)) u_max_ = std::numeric_limits<double>::min();
    }
  }

  double automatic_dt() const {
    const double rate = ensemble_.rho() * angular_.b0 * mean_relvel_;
    double dt = rate > 0.0 ? config_.collision_fraction / rate : std::numeric_limits<double>::infinity();
    if (tau() > 0.0) dt = std::min(dt, config_.max_tau_dt / tau());
    if (!std::isfinite(dt)) throw ConfigError("cannot choose dt: the gas neither collides nor stretches");
    return dt;
  }

  mutable ParticleEnsemble ensemble_;
  mutable double scale_ = 1.0;
  DsmcConfig config_;
  RestitutionParams restitution_;
  CrossSection cross_section_;
  AngularMoments angular_;
  RandomStream rng_;
  RandomStream diagnostics_rng_;
  double time_ = 0.0;
  double dt_ = 0.0;
  double u_max_ = 0.0;
  double mean_relvel_ = 0.0;
  double energy_ = 0.0;
  std::uint64_t steps_ = 0;
  std::uint64_t collisions_ = 0;
  std::uint64_t candidates_ = 0;
  std::uint64_t violations_ = 0;
};

//! Maps records of a rescaled run to the original variables through
//! f(t, v) = V^N g(ln V / tau, V v) with V = V0 + tau t, i.e. V = exp(tau t_resc):
//! t = (V - V0) / tau, velocities divide by V. Moments of order 2k scale by V^{-2k},
//! the dissipation estimate by V^{-3}; entropy is unchanged, and the L1 column is
//! left in rescaled units. tau = 0 is the identity.
inline std::vector<DiagnosticsRecord> transform_rescaled_to_original(std::span<const DiagnosticsRecord> records,
                                                                     const RestitutionParams& rp, double v0) {
  if (!(v0 > 0.0)) throw ContractViolation("transform_rescaled_to_original: V0 must be positive");
  std::vector<DiagnosticsRecord> out(records.begin(), records.end());
  const double tau = rp.tau_alpha;
  if (tau == 0.0) return out;
  for (auto& r : out) {
    const double v = std::exp(tau * r.t);
    r.t = (v - v0) / tau;
    for (double& p : r.momentum) p /= v;
    r.energy /= v * v;
    r.theta /= v * v;
    r.m_half /= v;
    r.m_32 /= v * v * v;
    r.m_2 /= v * v * v * v;
    r.m_3 /= v * v * v * v * v * v;
    r.de_est /= v * v * v;
    r.de_se /= v * v * v;
  }
  return out;
}

}  // namespace gk
