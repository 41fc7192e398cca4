/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <functional>

#include "enff/core/parallel.hpp"
#include "enff/core/rng.hpp"
#include "enff/core/types.hpp"

namespace enff {

/// x_j = psi(x_{j-1}) + xi with xi ~ N(0, std^2 I). `step` covers a whole DA interval
/// and must be safe to call concurrently.
struct TransitionModel {
  std::function<StateVec(const StateVec&)> step;
  double model_noise_std = 0.0;
};

/// Maps every member through `step`, adds keyed model noise and bumps step_index.
/// Noise for member n at the new step j uses stream (j, n, ModelNoise).
Ensemble propagate(const TransitionModel& model, const Ensemble& ens, const RngSource& rng,
                   const Parallel& par = Parallel());

}  // namespace enff
