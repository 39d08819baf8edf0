// Copyright 2026 The granular-kinetics Authors.
// SPDX-License-Identifier: Apache-2.0
//! \file particle_ensemble.hpp
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace gk {

//! Equal-weight empirical velocity distribution representing total mass rho.
//!
//! Velocities are stored row-major: particle i occupies
//! [i*dimension, (i+1)*dimension).
class ParticleEnsemble {
 public:
  ParticleEnsemble(int dimension, double rho, std::vector<double> velocities)
      : dimension_(dimension), rho_(rho), velocities_(std::move(velocities)) {
    if (dimension_ < 1) throw ContractViolation("ParticleEnsemble: dimension must be >= 1");
    if (!(rho_ > 0.0) || !std::isfinite(rho_))
      throw ContractViolation("ParticleEnsemble: rho must be positive");
    if (velocities_.size() % static_cast<std::size_t>(dimension_) != 0)
      throw ContractViolation("ParticleEnsemble: velocity buffer is not a multiple of dimension");
    if (size() < 2) throw ContractViolation("ParticleEnsemble: need at least two particles");
    for (double c : velocities_)
      if (!std::isfinite(c)) throw ContractViolation("ParticleEnsemble: non-finite velocity");
  }

  int dimension() const noexcept { return dimension_; }
  double rho() const noexcept { return rho_; }
  std::size_t size() const noexcept { return velocities_.size() / static_cast<std::size_t>(dimension_); }
  //! Mass carried by each particle.
  double weight() const noexcept { return rho_ / static_cast<double>(size()); }

  std::span<const double> velocity(std::size_t i) const {
    return {velocities_.data() + i * dimension_, static_cast<std::size_t>(dimension_)};
  }
  std::span<double> velocity(std::size_t i) {
    return {velocities_.data() + i * dimension_, static_cast<std::size_t>(dimension_)};
  }

  std::span<const double> data() const noexcept { return velocities_; }
  std::span<double> data() noexcept { return velocities_; }

  //! Subtracts the mean velocity from every particle.
  void remove_mean_velocity() {
    std::vector<double> mean(dimension_, 0.0);
    for (std::size_t i = 0; i < size(); ++i)
      for (int k = 0; k < dimension_; ++k) mean[k] += velocities_[i * dimension_ + k];
    for (double& m : mean) m /= static_cast<double>(size());
    for (std::size_t i = 0; i < size(); ++i)
      for (int k = 0; k < dimension_; ++k) velocities_[i * dimension_ + k] -= mean[k];
  }

  //! Multiplies every velocity by `factor` (mass unchanged).
  void scale_velocities(double factor) {
    for (double& c : velocities_) c *= factor;
  }

  //! Ensemble with the same velocities carrying a different total mass.
  ParticleEnsemble with_mass(double rho) const { return ParticleEnsemble(dimension_, rho, velocities_); }

 private:
  int dimension_;
  double rho_;
  std::vector<double> velocities_;
};

}  // namespace gk
