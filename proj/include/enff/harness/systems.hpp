/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include "enff/core/rng.hpp"
#include "enff/core/transition.hpp"
#include "enff/core/types.hpp"
#include "enff/dynamics/truth.hpp"
#include "enff/harness/config.hpp"

namespace enff::harness {

/// Initial ensemble at DA step 0. Lorenz '96 draws from N(0, I), KS and NS from
/// N(u0, I) around the truth's initial condition, the linear system from its prior.
/// Member n uses stream (0, n, EnsembleInit).
Ensemble initial_ensemble(const ExperimentConfig& cfg, const StateVec& u0, std::size_t N,
                          const RngSource& rng);

/// One DA interval (observe_every solver steps) of the configured system.
TransitionModel experiment_transition(const ExperimentConfig& cfg);

}  // namespace enff::harness
