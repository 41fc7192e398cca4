/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <functional>
#include <string>
#include <variant>

#include "enff/core/observation.hpp"
#include "enff/core/rng.hpp"
#include "enff/core/transition.hpp"
#include "enff/dynamics/kuramoto_sivashinsky.hpp"
#include "enff/dynamics/lorenz96.hpp"
#include "enff/dynamics/navier_stokes.hpp"

namespace enff {

/// x' = a x per solver step, prior N(m0, c0 I). Small test system with a Kalman oracle.
struct LinearGaussianConfig {
  Index d = 1;
  double a = 1.0;
  double m0 = 0.0;
  double c0 = 1.0;

  void validate() const;
};

using SystemConfig = std::variant<Lorenz96Config, KSConfig, NSConfig, LinearGaussianConfig>;

std::string system_name(const SystemConfig& cfg);

struct Protocol {
  int total_steps = 1800;
  int burn_in = 1000;
  int observe_every = 10;
  double obs_noise_std = 0.05;
  double model_noise_std = 0.0;

  void validate() const;
  /// Number of DA steps after burn-in.
  int da_steps() const { return (total_steps - burn_in) / observe_every; }
};

/// Reference protocols: L96 1800/1000/10/0.05, KS 6000/2000/10/0.1, NS 6000/0/100/0.1.
Protocol default_protocol(const SystemConfig& cfg);

/// Solver and truth initial condition of a system. Both callables are thread-safe.
struct DynamicalSystem {
  std::string name;
  Index dim = 0;
  std::function<StateVec(const StateVec&)> solver_step;
  /// Truth initial condition (after any spin-up); consumes the given stream.
  std::function<StateVec(RngStream&)> initial_condition;
};

DynamicalSystem make_system(const SystemConfig& cfg);

/// Model for one DA interval of `steps` solver steps.
TransitionModel system_transition(const DynamicalSystem& sys, int steps, double model_noise_std);

struct TruthRun {
  /// truth[0] is the state at the end of burn-in, truth[j] the state at DA step j.
  std::vector<StateVec> truth;
  /// (j, y_j) for j = 1..J.
  std::vector<std::pair<std::size_t, ObsVec>> observations;
  /// u0 of the protocol (post spin-up for KS, projected GP sample for NS).
  StateVec initial_condition;
};

/// Runs burn-in, then J DA intervals of observe_every solver steps, observing at the
/// end of each interval. Streams: (0, 0, TruthInit) for the initial condition,
/// (j, 0, TruthModelNoise) and (j, 0, TruthObs) per DA step.
TruthRun make_truth_and_obs(const SystemConfig& cfg, const ObservationModel& obs,
                            const Protocol& protocol, const RngSource& rng);

}  // namespace enff
