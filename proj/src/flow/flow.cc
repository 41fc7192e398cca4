/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/flow/flow.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "enff/core/errors.hpp"
#include "enff/core/numerics.hpp"

namespace enff {

FlowKind FlowKind::ot(double sigma_min) {
  FlowKind k{FlowType::OT, sigma_min};
  k.validate();
  return k;
}

FlowKind FlowKind::f2p(double sigma_min) {
  FlowKind k{FlowType::F2P, sigma_min};
  k.validate();
  return k;
}

void FlowKind::validate() const {
  if (!std::isfinite(sigma_min)) throw ConfigError("sigma_min must be finite");
  if (type == FlowType::OT && !(sigma_min > 0.0 && sigma_min < 1.0))
    throw ConfigError("OT flow needs sigma_min in (0, 1)");
  // F2P allows sigma_min = 0, the deterministic-transport limit.
  if (type == FlowType::F2P && sigma_min < 0.0) throw ConfigError("F2P flow needs sigma_min >= 0");
}

double FlowKind::beta(double t) const {
  return type == FlowType::OT ? 1.0 - (1.0 - sigma_min) * t : 1.0 - t;
}

double FlowKind::sigma(double) const { return type == FlowType::OT ? 0.0 : sigma_min; }

double FlowKind::path_std(double t) const {
  return type == FlowType::OT ? 1.0 - (1.0 - sigma_min) * t : sigma_min;
}

PathTime::PathTime(double t) : t_(t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("path time must lie in [0, 1]");
}

CoupledPairSet::CoupledPairSet(FlowKind kind, const std::vector<StateVec>& refs,
                               const std::vector<StateVec>& targets)
    : CoupledPairSet(kind, stack_rows(refs), stack_rows(targets)) {}

CoupledPairSet::CoupledPairSet(FlowKind kind, Matrix refs, Matrix targets)
    : kind_(kind), Z0_(std::move(refs)), Z1_(std::move(targets)) {
  kind_.validate();
  if (Z1_.rows() < 1) throw ConfigError("pair set needs at least one pair");
  if (Z0_.rows() != Z1_.rows() || Z0_.cols() != Z1_.cols())
    throw ConfigError("refs and targets must have the same shape");
}

// -----------------------------------------------------------------------------

MixtureEvaluator::MixtureEvaluator(const CoupledPairSet& pairs, const Eigen::ArrayXd* log_tilt)
    : pairs_(pairs), tilt_(log_tilt) {
  if (tilt_ && tilt_->size() != pairs.size())
    throw ConfigError("log tilt length differs from the number of pairs");
  d2_.resize(pairs.size());
  w_.resize(pairs.size());
}

void MixtureEvaluator::evaluate(const StateVec& z, double t) {
  const Matrix& Z0 = pairs_.refs();
  const Matrix& Z1 = pairs_.targets();
  const FlowKind& kind = pairs_.kind();
  if (z.size() != pairs_.dim()) throw ConfigError("query dimension differs from pair dimension");
  const double a = kind.alpha(t);
  const double b = kind.mean_ref_coeff(t);
  const double s = kind.path_std(t);

  d2_.setZero();
  for (Index i = 0; i < Z1.cols(); ++i) {
    if (b == 0.0)
      d2_ += (z[i] - a * Z1.col(i).array()).square();
    else
      d2_ += (z[i] - a * Z1.col(i).array() - b * Z0.col(i).array()).square();
  }

  if (s > 0.0) {
    w_ = d2_ * (-0.5 / (s * s));
    if (tilt_) w_ += *tilt_;
    softmax_inplace(w_);
  } else {
    // Zero path width: the softmax limit puts all mass on the nearest path mean(s).
    const double dmin = d2_.minCoeff();
    for (Index n = 0; n < w_.size(); ++n)
      w_[n] = d2_[n] == dmin ? (tilt_ ? (*tilt_)[n] : 0.0) : -std::numeric_limits<double>::infinity();
    softmax_inplace(w_);
  }

  zhat1_.noalias() = Z1.transpose() * w_.matrix();
  if (kind.type == FlowType::F2P) zhat0_.noalias() = Z0.transpose() * w_.matrix();
}

StateVec MixtureEvaluator::velocity(const StateVec& z, double t) const {
  const FlowKind& kind = pairs_.kind();
  if (kind.type == FlowType::F2P) return zhat1_ - zhat0_;
  const double c = 1.0 - kind.sigma_min;
  return (zhat1_ - c * z) / (1.0 - c * t);
}

// -----------------------------------------------------------------------------

StateVec cond_vf(const FlowKind& kind, const StateVec& z, const StateVec& z0, const StateVec& z1,
                 PathTime t) {
  if (kind.type == FlowType::F2P) return z1 - z0;
  const double c = 1.0 - kind.sigma_min;
  const double denom = 1.0 - c * t.value();
  if (!(denom > 0.0)) throw DomainError("OT conditional field undefined at this time");
  return (z1 - c * z) / denom;
}

double cond_log_density(const FlowKind& kind, const StateVec& z, const StateVec& z0,
                        const StateVec& z1, PathTime t) {
  const double tv = t.value();
  const double s = kind.path_std(tv);
  if (!(s > 0.0)) throw DomainError("conditional path has zero variance");
  StateVec mean = kind.alpha(tv) * z1;
  if (kind.type == FlowType::F2P) mean += kind.mean_ref_coeff(tv) * z0;
  const double d = static_cast<double>(z.size());
  return -0.5 * (z - mean).squaredNorm() / (s * s) - d * std::log(s) -
         0.5 * d * std::log(2.0 * std::numbers::pi);
}

StateVec sample_initial(const FlowKind& kind, const StateVec& z0, RngStream& rng) {
  if (kind.type == FlowType::OT) return rng.normal_vector(z0.size());
  StateVec z = z0;
  if (kind.sigma_min > 0.0)
    for (Index i = 0; i < z.size(); ++i) z[i] += kind.sigma_min * rng.normal();
  return z;
}

Eigen::ArrayXd pair_weights(const CoupledPairSet& pairs, const StateVec& z, PathTime t) {
  MixtureEvaluator ev(pairs);
  ev.evaluate(z, t.value());
  return ev.weights();
}

StateVec marginal_vf(const CoupledPairSet& pairs, const StateVec& z, PathTime t) {
  MixtureEvaluator ev(pairs);
  ev.evaluate(z, t.value());
  return ev.velocity(z, t.value());
}

FlowResult integrate_flow(const VectorField& field, const StateVec& z_init, int T,
                          bool keep_trajectory) {
  if (T < 1) throw ConfigError("number of Euler steps must be at least 1");
  FlowResult out;
  if (keep_trajectory) out.trajectory.reserve(static_cast<std::size_t>(T) + 1);
  StateVec z = z_init;
  if (!all_finite(z)) throw IntegrationBlowup(0);
  if (keep_trajectory) out.trajectory.push_back(z);
  const double dt = 1.0 / static_cast<double>(T);
  for (int k = 0; k < T; ++k) {
    z += dt * field(z, static_cast<double>(k) * dt);
    if (!all_finite(z)) throw IntegrationBlowup(k + 1);
    if (keep_trajectory) out.trajectory.push_back(z);
  }
  out.endpoint = std::move(z);
  return out;
}

}  // namespace enff
