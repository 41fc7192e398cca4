/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/guidance/guidance.hpp"

#include <cmath>

#include "enff/core/errors.hpp"

namespace enff {

GuidanceKind GuidanceKind::mc() { return GuidanceKind{GuidanceType::MC, 0.0}; }

GuidanceKind GuidanceKind::localized(double lambda) {
  GuidanceKind k{GuidanceType::Localized, lambda};
  k.validate();
  return k;
}

void GuidanceKind::validate() const {
  if (type == GuidanceType::Localized && !(std::isfinite(lambda) && lambda >= 0.0))
    throw ConfigError("guidance strength lambda must be finite and non-negative");
}

Eigen::ArrayXd likelihood_tilt(const CoupledPairSet& pairs, const ObservationModel& obs,
                               const ObsVec& y) {
  Eigen::ArrayXd tilt(pairs.size());
  for (Index n = 0; n < pairs.size(); ++n) tilt[n] = -obs.energy(pairs.target(n), y);
  return tilt;
}

GuidedField::GuidedField(const CoupledPairSet& pairs, const ObservationModel& obs,
                         const ObsVec& y, GuidanceKind kind, const Eigen::ArrayXd* shared_tilt)
    : pairs_(pairs),
      obs_(obs),
      y_(y),
      kind_(kind),
      tilt_(kind.type == GuidanceType::MC && !shared_tilt ? likelihood_tilt(pairs, obs, y)
                                                          : Eigen::ArrayXd()),
      eval_(pairs, kind.type != GuidanceType::MC ? nullptr : shared_tilt ? shared_tilt : &tilt_) {
  kind_.validate();
  guidance_ = StateVec::Zero(pairs.dim());
}

StateVec GuidedField::operator()(const StateVec& z, double t) {
  eval_.evaluate(z, t);
  StateVec u = eval_.velocity(z, t);
  if (kind_.type == GuidanceType::Localized && kind_.lambda != 0.0) {
    guidance_ = -kind_.lambda * obs_.grad_energy(eval_.mean_target(), y_);
    u += guidance_;
  } else {
    guidance_.setZero();
  }
  return u;
}

StateVec mc_guided_vf(const CoupledPairSet& pairs, const ObservationModel& obs, const ObsVec& y,
                      const StateVec& z, PathTime t) {
  GuidedField f(pairs, obs, y, GuidanceKind::mc());
  return f(z, t.value());
}

StateVec localized_guidance(const CoupledPairSet& pairs, const ObservationModel& obs,
                            const ObsVec& y, const StateVec& z, PathTime t, double lambda) {
  if (!(std::isfinite(lambda) && lambda >= 0.0))
    throw ConfigError("guidance strength lambda must be finite and non-negative");
  if (lambda == 0.0) return StateVec::Zero(z.size());
  MixtureEvaluator ev(pairs);
  ev.evaluate(z, t.value());
  return -lambda * obs.grad_energy(ev.mean_target(), y);
}

StateVec guided_vf(const CoupledPairSet& pairs, const ObservationModel& obs, const ObsVec& y,
                   const GuidanceKind& kind, const StateVec& z, PathTime t) {
  GuidedField f(pairs, obs, y, kind);
  return f(z, t.value());
}

}  // namespace enff
