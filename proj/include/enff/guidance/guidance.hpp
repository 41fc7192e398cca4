/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include "enff/core/observation.hpp"
#include "enff/flow/flow.hpp"

namespace enff {

enum class GuidanceType { MC, Localized };

struct GuidanceKind {
  GuidanceType type = GuidanceType::Localized;
  double lambda = 0.0;

  static GuidanceKind mc();
  static GuidanceKind localized(double lambda);

  void validate() const;
};

/// Guided field u'_t(z; y) bound to one pair set and observation. The MC variant
/// tilts the pair weights by exp(-J(z1_n; y)); the tilt is computed once here.
/// Not thread-safe (scratch buffers); make one per worker.
class GuidedField {
 public:
  /// `shared_tilt` lets many fields over the same pairs reuse one tilt vector.
  GuidedField(const CoupledPairSet& pairs, const ObservationModel& obs, const ObsVec& y,
              GuidanceKind kind, const Eigen::ArrayXd* shared_tilt = nullptr);

  StateVec operator()(const StateVec& z, double t);

  /// -lambda * grad J(zhat1; y) using the unguided weights; valid after operator().
  const StateVec& last_guidance() const { return guidance_; }

 private:
  const CoupledPairSet& pairs_;
  const ObservationModel& obs_;
  const ObsVec& y_;
  GuidanceKind kind_;
  Eigen::ArrayXd tilt_;
  MixtureEvaluator eval_;
  StateVec guidance_;
};

/// -J(z1_n; y) for every target.
Eigen::ArrayXd likelihood_tilt(const CoupledPairSet& pairs, const ObservationModel& obs,
                               const ObsVec& y);

StateVec mc_guided_vf(const CoupledPairSet& pairs, const ObservationModel& obs, const ObsVec& y,
                      const StateVec& z, PathTime t);
StateVec localized_guidance(const CoupledPairSet& pairs, const ObservationModel& obs,
                            const ObsVec& y, const StateVec& z, PathTime t, double lambda);
StateVec guided_vf(const CoupledPairSet& pairs, const ObservationModel& obs, const ObsVec& y,
                   const GuidanceKind& kind, const StateVec& z, PathTime t);

}  // namespace enff
