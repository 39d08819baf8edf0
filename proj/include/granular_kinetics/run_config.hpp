// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file run_config.hpp
//! Resolved run configuration shared by the experiments and the command line.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dsmc.hpp"
#include "errors.hpp"
#include "kernel.hpp"

namespace gk {

enum class CrossSectionKind { kHardSphere, kTabulated };
enum class ScheduleKind { kLinear, kGeometric };
//! Initial datum: M_{rho,0,theta0}, or an equal mixture of M_{rho,+-u,theta0/2} along the
//! first axis with |u|^2 = N theta0 / 2 (same energy).
enum class InitialShape { kMaxwellian, kBimodal };

//! Every knob of a run. Zero in t_end / initial_theta / dt means "choose for me".
struct RunConfig {
  std::string experiment = "simulate";
  int dimension = 3;
  double alpha = 0.99;
  double rho = 1.0;
  CrossSectionKind cross_section = CrossSectionKind::kHardSphere;
  double b0_prime = 1.0;
  std::vector<double> b_table;
  std::uint64_t particles = 100000;
  std::uint64_t replicas = 8;
  std::uint64_t seed = 1;
  double dt = 0.0;
  double collision_fraction = 0.1;
  bool adaptive_dt = true;
  double majorant_relvel = 0.0;
  int majorant_refresh_interval = 50;
  Mode mode = Mode::kRescaled;
  bool recenter_momentum = true;
  unsigned threads = 0;
  double t_end = 0.0;
  ScheduleKind schedule = ScheduleKind::kLinear;
  int outputs = 200;
  double initial_theta = 0.0;
  InitialShape initial_shape = InitialShape::kMaxwellian;
  int bins = 64;
  std::uint64_t pair_samples = 20000;
  std::uint64_t bootstrap_resamples = 200;
  std::vector<double> alphas{0.9, 0.95, 0.99};
  std::vector<double> rhos{1.0, 2.0};
  std::vector<double> attractor_thetas{1.0, 9.0};
  std::string output_dir = ".";

  bool operator==(const RunConfig&) const = default;
};

//! Throws ConfigError naming the first offending key.
inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); };
  if (c.dimension < 2 || c.dimension > kMaxDsmcDimension) fail("dimension", "must lie in [2, 16]");
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) fail("alpha", "must lie in [0, 1]");
  if (!(c.rho > 0.0) || !std::isfinite(c.rho)) fail("rho", "must be positive");
  if (!(c.b0_prime > 0.0) || !std::isfinite(c.b0_prime)) fail("b0_prime", "must be positive");
  if (c.cross_section == CrossSectionKind::kHardSphere && c.dimension != 3)
    fail("cross_section", "hard_sphere requires dimension = 3");
  if (c.cross_section == CrossSectionKind::kTabulated && c.b_table.size() < 2)
    fail("b_table", "tabulated cross-section needs at least two values");
  for (std::size_t i = 0; i < c.b_table.size(); ++i) {
    if (!(c.b_table[i] > 0.0)) fail("b_table", "values must be positive");
    if (i > 0 && c.b_table[i] < c.b_table[i - 1]) fail("b_table", "values must be non-decreasing");
  }
  if (c.particles < 2) fail("particles", "must be >= 2");
  if (c.replicas < 1) fail("replicas", "must be >= 1");
  if (!(c.dt >= 0.0) || !std::isfinite(c.dt)) fail("dt", "must be >= 0");
  if (!(c.collision_fraction > 0.0 && c.collision_fraction <= 0.2)) fail("collision_fraction", "must lie in (0, 0.2]");
  if (!(c.majorant_relvel >= 0.0) || !std::isfinite(c.majorant_relvel)) fail("majorant_relvel", "must be >= 0");
  if (c.majorant_refresh_interval < 1) fail("majorant_refresh_interval", "must be >= 1");
  if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) fail("t_end", "must be >= 0");
  if (c.outputs < 2) fail("outputs", "must be >= 2");
  if (!(c.initial_theta >= 0.0) || !std::isfinite(c.initial_theta)) fail("initial_theta", "must be >= 0");
  if (c.bins < 2) fail("bins", "must be >= 2");
  if (c.pair_samples < 100) fail("pair_samples", "must be >= 100");
  if (c.bootstrap_resamples < 10) fail("bootstrap_resamples", "must be >= 10");
  for (double a : c.alphas)
    if (!(a >= 0.0 && a <= 1.0)) fail("alphas", "values must lie in [0, 1]");
  for (double r : c.rhos)
    if (!(r > 0.0) || !std::isfinite(r)) fail("rhos", "values must be positive");
  for (double t : c.attractor_thetas)
    if (!(t > 0.0) || !std::isfinite(t)) fail("attractor_thetas", "values must be positive");
  if (c.output_dir.empty()) fail("output_dir", "must not be empty");
}

inline CrossSection make_cross_section(const RunConfig& c) {
  if (c.cross_section == CrossSectionKind::kHardSphere) return CrossSection(c.dimension, HardSphereConstant{c.b0_prime});
  return CrossSection(c.dimension, Tabulated{c.b_table});
}

inline DsmcConfig make_dsmc_config(const RunConfig& c, Mode mode, std::uint64_t phase, std::uint64_t replica) {
  DsmcConfig d;
  d.dt = c.dt;
  d.collision_fraction = c.collision_fraction;
  d.adaptive_dt = c.adaptive_dt;
  d.majorant_relvel = c.majorant_relvel;
  d.majorant_refresh_interval = c.majorant_refresh_interval;
  d.seed = c.seed;
  d.phase = phase;
  d.replica = replica;
  d.mode = mode;
  d.recenter_momentum = c.recenter_momentum;
  return d;
}

//! Output times on [t_start, t_end]. Geometric grids start at t_start and then
//! space the remaining points geometrically from (t_end - t_start) * 1e-3.
inline std::vector<double> make_schedule(ScheduleKind kind, double t_start, double t_end, int outputs) {
  if (!(t_end > t_start)) throw ContractViolation("make_schedule: t_end must exceed t_start");
  if (outputs < 2) throw ContractViolation("make_schedule: need at least two outputs");
  std::vector<double> t(outputs);
  const double span = t_end - t_start;
  if (kind == ScheduleKind::kLinear) {
    for (int k = 0; k < outputs; ++k) t[k] = t_start + span * k / (outputs - 1);
  } else {
    t[0] = t_start;
    const double first = span * 1e-3;
    for (int k = 1; k < outputs; ++k)
      t[k] = t_start + first * std::pow(span / first, static_cast<double>(k - 1) / std::max(1, outputs - 2));
  }
  t.back() = t_end;
  return t;
}

}  // namespace gk
