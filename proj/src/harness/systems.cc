/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/harness/systems.hpp"

#include <cmath>

namespace enff::harness {

Ensemble initial_ensemble(const ExperimentConfig& cfg, const StateVec& u0, std::size_t N,
                          const RngSource& rng) {
  const DynamicalSystem sys = make_system(cfg.system);
  StateVec centre = StateVec::Zero(sys.dim);
  double scale = 1.0;
  if (std::holds_alternative<KSConfig>(cfg.system) || std::holds_alternative<NSConfig>(cfg.system)) {
    centre = u0;
  } else if (const auto* l = std::get_if<LinearGaussianConfig>(&cfg.system)) {
    centre.setConstant(l->m0);
    scale = std::sqrt(l->c0);
  }
  std::vector<StateVec> members(N);
  for (std::size_t n = 0; n < N; ++n) {
    RngStream s = rng.stream(0, n, Purpose::EnsembleInit);
    members[n] = centre + scale * s.normal_vector(sys.dim);
  }
  return Ensemble(std::move(members), 0);
}

TransitionModel experiment_transition(const ExperimentConfig& cfg) {
  return system_transition(make_system(cfg.system), cfg.protocol.observe_every,
                           cfg.protocol.model_noise_std);
}

}  // namespace enff::harness
