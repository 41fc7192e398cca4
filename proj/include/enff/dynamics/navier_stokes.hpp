/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <vector>

#include "enff/core/rng.hpp"
#include "enff/core/types.hpp"
#include "enff/dynamics/spectral.hpp"

namespace enff {

struct NSConfig {
  int n = 64;
  double length = 2.0;
  double nu = 1e-3;
  double dt = 1e-4;
  int steps_per_da = 100;
  double forcing_amplitude = 0.05;
  int forcing_mode = 8;
  double gp_lengthscale = 0.2;

  void validate() const;
};

/// Velocity (u, v) and pressure p on an n x n periodic grid, row-major with the
/// first index along x1 and the second along x2.
struct NSFields {
  std::vector<double> u, v, p;
};

class NSWorkspace {
 public:
  explicit NSWorkspace(const NSConfig& cfg);

  const NSConfig& config() const { return cfg_; }
  const RealFFT2D& fft() const { return fft_; }
  int n() const { return cfg_.n; }
  int half() const { return cfg_.n / 2 + 1; }

  /// Derivative wavenumbers (Nyquist set to zero) and full |k|^2 for the Laplacian.
  double kx(int i) const { return kx_[static_cast<std::size_t>(i)]; }
  double ky(int j) const { return ky_[static_cast<std::size_t>(j)]; }
  double lap(int i, int j) const { return lap_[static_cast<std::size_t>(i * half() + j)]; }
  bool keep(int i, int j) const { return mask_[static_cast<std::size_t>(i * half() + j)]; }
  const std::vector<Complex>& forcing_hat() const { return fu_hat_; }

 private:
  NSConfig cfg_;
  RealFFT2D fft_;
  std::vector<double> kx_, ky_, lap_;
  std::vector<bool> mask_;
  std::vector<Complex> fu_hat_;
};

/// One Chorin projection step: explicit advection (conservative form, 2/3-dealiased),
/// diffusion and forcing give a provisional velocity, the pressure Poisson equation
/// is solved spectrally and the velocity is projected onto divergence-free fields.
NSFields ns_step(const NSConfig& cfg, const NSWorkspace& ws, const NSFields& state);

/// Leray projection of the velocity; pressure is left untouched.
NSFields ns_project(const NSWorkspace& ws, const NSFields& state);

double ns_max_divergence(const NSWorkspace& ws, const NSFields& state);
/// Mean of (u^2 + v^2) / 2 over the grid.
double ns_kinetic_energy(const NSFields& state);

StateVec ns_pack(const NSFields& state);
NSFields ns_unpack(const StateVec& x, int n);

/// Squared-exponential GP sample through regular Fourier features
/// cos(2 pi w.x), sin(2 pi w.x) with w on the lattice Z^2 / L and spectral weight
/// exp(-2 pi^2 l^2 |w|^2). Pressure is zero. The velocity is not projected.
NSFields gp_initial_condition(const NSConfig& cfg, RngStream& rng);

}  // namespace enff
