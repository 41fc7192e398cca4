/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/core/transition.hpp"

#include "enff/core/errors.hpp"

namespace enff {

Ensemble propagate(const TransitionModel& model, const Ensemble& ens, const RngSource& rng,
                   const Parallel& par) {
  if (!model.step) throw ConfigError("transition model has no step function");
  if (model.model_noise_std < 0.0) throw ConfigError("model noise std must be non-negative");
  ens.validate();
  const std::size_t next = ens.step_index + 1;
  Ensemble out;
  out.step_index = next;
  out.members.resize(ens.size());
  par.for_each(ens.size(), [&](std::size_t n) {
    StateVec x;
    try {
      x = model.step(ens.members[n]);
    } catch (const BlowupError&) {
      throw PropagationBlowup(static_cast<long>(next), static_cast<long>(n));
    }
    if (x.size() != ens.members[n].size())
      throw ConfigError("transition step changed the state dimension");
    if (model.model_noise_std > 0.0) {
      RngStream s = rng.stream(next, n, Purpose::ModelNoise);
      for (Index i = 0; i < x.size(); ++i) x[i] += model.model_noise_std * s.normal();
    }
    if (!all_finite(x)) throw PropagationBlowup(static_cast<long>(next), static_cast<long>(n));
    out.members[n] = std::move(x);
  });
  return out;
}

}  // namespace enff
