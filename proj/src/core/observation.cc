/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/core/observation.hpp"

#include <cmath>
#include <string>

#include "enff/core/errors.hpp"

namespace enff {

ObservationModel::ObservationModel(Kind kind, std::optional<Matrix> H, double sigma)
    : kind_(kind), H_(std::move(H)), sigma_(sigma) {
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_))
    throw ConfigError("observation noise std must be finite and non-negative");
}

ObservationModel ObservationModel::arctan(double sigma_y) {
  return ObservationModel(Kind::ArctanFull, std::nullopt, sigma_y);
}

ObservationModel ObservationModel::linear(Matrix H, double sigma_y) {
  if (H.rows() < 1 || H.cols() < 1) throw ConfigError("observation matrix is empty");
  if (H.rows() > H.cols()) throw ConfigError("observation matrix has more rows than columns");
  return ObservationModel(Kind::Linear, std::move(H), sigma_y);
}

ObservationModel ObservationModel::identity(double sigma_y) {
  return ObservationModel(Kind::Linear, std::nullopt, sigma_y);
}

Index ObservationModel::obs_dim(Index state_dim) const {
  return H_ ? H_->rows() : state_dim;
}

void ObservationModel::check_state(const StateVec& x) const {
  if (H_ && H_->cols() != x.size())
    throw ConfigError("observation matrix expects dimension " + std::to_string(H_->cols()) +
                      ", got " + std::to_string(x.size()));
}

void ObservationModel::check_obs(const StateVec& x, const ObsVec& y) const {
  check_state(x);
  if (y.size() != obs_dim(x.size()))
    throw ConfigError("observation has dimension " + std::to_string(y.size()) + ", expected " +
                      std::to_string(obs_dim(x.size())));
}

ObsVec ObservationModel::apply(const StateVec& x) const {
  check_state(x);
  if (kind_ == Kind::ArctanFull) return x.array().atan().matrix();
  if (H_) return *H_ * x;
  return x;
}

StateVec ObservationModel::adjoint(const StateVec& x, const ObsVec& r) const {
  check_obs(x, r);
  if (kind_ == Kind::ArctanFull) return (r.array() / (1.0 + x.array().square())).matrix();
  if (H_) return H_->transpose() * r;
  return r;
}

double ObservationModel::energy(const StateVec& x, const ObsVec& y) const {
  check_obs(x, y);
  if (sigma_ <= 0.0) throw DomainError("energy requires a positive observation noise std");
  return 0.5 * (y - apply(x)).squaredNorm() / (sigma_ * sigma_);
}

StateVec ObservationModel::grad_energy(const StateVec& x, const ObsVec& y) const {
  return energy_and_grad(x, y).second;
}

std::pair<double, StateVec> ObservationModel::energy_and_grad(const StateVec& x,
                                                               const ObsVec& y) const {
  check_obs(x, y);
  if (sigma_ <= 0.0) throw DomainError("energy requires a positive observation noise std");
  const double s2 = sigma_ * sigma_;
  const ObsVec r = y - apply(x);
  return {0.5 * r.squaredNorm() / s2, -adjoint(x, r) / s2};
}

ObsVec observe(const ObservationModel& model, const StateVec& x, RngStream& rng) {
  ObsVec y = model.apply(x);
  if (model.sigma() > 0.0)
    for (Index i = 0; i < y.size(); ++i) y[i] += model.sigma() * rng.normal();
  return y;
}

std::pair<double, StateVec> energy_and_grad(const ObservationModel& model, const StateVec& x,
                                            const ObsVec& y) {
  return model.energy_and_grad(x, y);
}

}  // namespace enff
