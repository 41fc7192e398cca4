/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <numbers>

#include "enff/core/types.hpp"
#include "enff/dynamics/spectral.hpp"

namespace enff {

struct KSConfig {
  Index n = 1024;
  double length = 128.0 * std::numbers::pi;
  double dt = 0.25;
  int steps_per_da = 10;

  /// 128 points on 16 pi: the full-scale grid spacing on a shorter domain.
  static KSConfig desk();
  void validate() const;
};

/// Wavenumbers, 2/3 mask and ETD-RK4 coefficient tables for one KSConfig. Read-only
/// after construction and shareable between threads.
class KSWorkspace {
 public:
  explicit KSWorkspace(const KSConfig& cfg);

  const KSConfig& config() const { return cfg_; }
  Index modes() const { return k_.size(); }

  const Eigen::ArrayXd& wavenumbers() const { return k_; }
  const Eigen::ArrayXd& linear() const { return lin_; }
  const Eigen::ArrayXd& E() const { return E_; }
  const Eigen::ArrayXd& E2() const { return E2_; }
  const Eigen::ArrayXd& Q() const { return Q_; }
  const Eigen::ArrayXd& f1() const { return f1_; }
  const Eigen::ArrayXd& f2() const { return f2_; }
  const Eigen::ArrayXd& f3() const { return f3_; }
  const Eigen::ArrayXcd& nonlinear_factor() const { return g_; }
  const RealFFT1D& fft() const { return fft_; }

 private:
  KSConfig cfg_;
  Eigen::ArrayXd k_, lin_, E_, E2_, Q_, f1_, f2_, f3_;
  Eigen::ArrayXcd g_;
  RealFFT1D fft_;
};

/// One ETD-RK4 step of u_t = -u_xx - u_xxxx - (u^2/2)_x on the periodic grid.
StateVec ks_step(const KSConfig& cfg, const KSWorkspace& ws, const StateVec& u);

/// cos(2 pi x / L)(1 + sin(2 pi x / L)) on the grid.
StateVec ks_profile(const KSConfig& cfg);

}  // namespace enff
