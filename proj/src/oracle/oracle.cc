/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "enff/core/errors.hpp"

namespace enff::oracle {

namespace {

void require_spd(const Matrix& C, const char* what) {
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + C.cwiseAbs().maxCoeff()))
    throw NumericalError(std::string(what) + " is not symmetric");
  Eigen::LLT<Matrix> llt(C);
  if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + " is not SPD");
}

}  // namespace

GaussianBelief kalman_step(const GaussianBelief& b, const Matrix& A, const Matrix& Sigma,
                           const Matrix& H, const Matrix& Gamma, const ObsVec& y) {
  require_spd(b.cov, "prior covariance");
  const StateVec m = A * b.mean;
  const Matrix C = A * b.cov * A.transpose() + Sigma;
  const Matrix S = H * C * H.transpose() + Gamma;
  require_spd(S, "innovation covariance");
  const Eigen::LLT<Matrix> llt(S);
  const Matrix K = llt.solve(H * C).transpose();  // C H^T S^{-1}
  GaussianBelief out;
  out.mean = m + K * (y - H * m);
  const Matrix I = Matrix::Identity(C.rows(), C.cols());
  // Joseph form keeps the covariance symmetric positive definite.
  out.cov = (I - K * H) * C * (I - K * H).transpose() + K * Gamma * K.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

// -----------------------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

StateVec GridDensity::point(std::size_t flat) const {
  StateVec x(static_cast<Index>(rank()));
  for (std::size_t a = rank(); a-- > 0;) {
    const std::size_t n = axes[a].size();
    x[static_cast<Index>(a)] = axes[a][flat % n];
    flat /= n;
  }
  return x;
}

namespace {

std::vector<double> trapezoid_weights(const std::vector<double>& ax) {
  std::vector<double> w(ax.size(), 0.0);
  for (std::size_t i = 0; i + 1 < ax.size(); ++i) {
    const double h = 0.5 * (ax[i + 1] - ax[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

}  // namespace

double GridDensity::integrate(const std::vector<double>& f) const {
  if (rank() < 1 || rank() > 2) throw ConfigError("grid oracle supports one or two axes");
  const auto w0 = trapezoid_weights(axes[0]);
  if (rank() == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < w0.size(); ++i) s += w0[i] * f[i];
    return s;
  }
  const auto w1 = trapezoid_weights(axes[1]);
  double s = 0.0;
  for (std::size_t i = 0; i < w0.size(); ++i)
    for (std::size_t j = 0; j < w1.size(); ++j) s += w0[i] * w1[j] * f[i * w1.size() + j];
  return s;
}

StateVec GridDensity::mean() const {
  const double z = mass();
  StateVec m(static_cast<Index>(rank()));
  for (std::size_t a = 0; a < rank(); ++a) {
    std::vector<double> f(values.size());
    for (std::size_t q = 0; q < values.size(); ++q)
      f[q] = values[q] * point(q)[static_cast<Index>(a)];
    m[static_cast<Index>(a)] = integrate(f) / z;
  }
  return m;
}

Matrix GridDensity::covariance() const {
  const double z = mass();
  const StateVec m = mean();
  const Index r = static_cast<Index>(rank());
  Matrix C(r, r);
  for (Index a = 0; a < r; ++a)
    for (Index b = 0; b < r; ++b) {
      std::vector<double> f(values.size());
      for (std::size_t q = 0; q < values.size(); ++q) {
        const StateVec x = point(q);
        f[q] = values[q] * (x[a] - m[a]) * (x[b] - m[b]);
      }
      C(a, b) = integrate(f) / z;
    }
  return C;
}

GridDensity gaussian_grid(const GaussianBelief& b, const std::vector<std::vector<double>>& axes) {
  GridDensity g;
  g.axes = axes;
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  g.values.resize(total);
  const Eigen::LLT<Matrix> llt(b.cov);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance is not SPD");
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double k = static_cast<double>(b.mean.size());
  for (std::size_t q = 0; q < total; ++q) {
    const StateVec r = g.point(q) - b.mean;
    const double maha = r.dot(llt.solve(r));
    g.values[q] = std::exp(-0.5 * maha - 0.5 * logdet - 0.5 * k * std::log(2.0 * std::numbers::pi));
  }
  return g;
}

GridDensity grid_posterior(const GridDensity& prior, const ObservationModel& obs, const ObsVec& y) {
  GridDensity post = prior;
  for (std::size_t q = 0; q < post.values.size(); ++q)
    post.values[q] = prior.values[q] * std::exp(-obs.energy(prior.point(q), y));
  const double z = post.mass();
  if (!(z > 0.0) || !std::isfinite(z))
    throw GridCoverageError("posterior has no mass on the grid; widen the grid");
  for (auto& v : post.values) v /= z;
  return post;
}

// -----------------------------------------------------------------------------

std::vector<StateVec> bpf_jitter_reference(const std::vector<StateVec>& targets,
                                           const std::vector<double>& weights, double sigma_min,
                                           std::size_t M, RngStream& rng) {
  if (targets.empty() || targets.size() != weights.size())
    throw ConfigError("targets and weights must be non-empty and of equal length");
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::vector<StateVec> out;
  out.reserve(M);
  for (std::size_t m = 0; m < M; ++m) {
    StateVec x = targets[pick(rng.engine())];
    if (sigma_min > 0.0)
      for (Index i = 0; i < x.size(); ++i) x[i] += sigma_min * rng.normal();
    out.push_back(std::move(x));
  }
  return out;
}

std::optional<double> straightness(const std::vector<StateVec>& traj) {
  if (traj.size() < 2) return std::nullopt;
  double arc = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) arc += (traj[i] - traj[i - 1]).norm();
  const double chord = (traj.back() - traj.front()).norm();
  if (!(chord > 0.0)) return std::nullopt;
  return arc / chord;
}

StateVec fig1_toy_kernel(const StateVec& z0) {
  if (z0.size() != 2) throw ConfigError("toy kernel is defined in two dimensions");
  return (z0.array() + 6.0 * z0.array() / (1.0 + z0.array().square()) + 5.0).matrix();
}

double wasserstein1_1d(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size() || a.empty()) throw ConfigError("W1 needs equal, non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace enff::oracle
