/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <optional>
#include <vector>

#include "enff/core/observation.hpp"
#include "enff/core/rng.hpp"
#include "enff/core/types.hpp"

// Reference implementations for tests. Nothing here is used by the filters.
namespace enff::oracle {

struct GaussianBelief {
  StateVec mean;
  Matrix cov;
};

/// Predict with x' = A x + xi, xi ~ N(0, Sigma), then update with y = H x + eta,
/// eta ~ N(0, Gamma). Throws NumericalError for non-SPD covariances.
GaussianBelief kalman_step(const GaussianBelief& belief, const Matrix& A, const Matrix& Sigma,
                           const Matrix& H, const Matrix& Gamma, const ObsVec& y);

/// Density tabulated on a tensor grid with one or two axes. Values are stored with the
/// last axis fastest.
struct GridDensity {
  std::vector<std::vector<double>> axes;
  std::vector<double> values;

  std::size_t rank() const { return axes.size(); }
  StateVec point(std::size_t flat) const;
  /// Trapezoid rule over the grid.
  double integrate(const std::vector<double>& f) const;
  double mass() const { return integrate(values); }
  StateVec mean() const;
  Matrix covariance() const;
};

std::vector<double> linspace(double lo, double hi, std::size_t n);
GridDensity gaussian_grid(const GaussianBelief& b, const std::vector<std::vector<double>>& axes);

/// prior * exp(-J(x; y)), renormalised to unit mass. Throws GridCoverageError if the
/// product has no mass on the grid.
GridDensity grid_posterior(const GridDensity& prior, const ObservationModel& obs, const ObsVec& y);

/// M multinomial draws from `targets` with probabilities `weights`, each jittered by
/// N(0, sigma_min^2 I).
std::vector<StateVec> bpf_jitter_reference(const std::vector<StateVec>& targets,
                                           const std::vector<double>& weights, double sigma_min,
                                           std::size_t M, RngStream& rng);

/// Arc length over chord length; nullopt when the chord is zero.
std::optional<double> straightness(const std::vector<StateVec>& trajectory);

/// z + 6 z / (1 + z^2) + 5, elementwise, for z in R^2.
StateVec fig1_toy_kernel(const StateVec& z0);

/// W1 between two equally sized 1D samples (sorted L1 distance).
double wasserstein1_1d(std::vector<double> a, std::vector<double> b);

}  // namespace enff::oracle
