/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "enff/core/observation.hpp"
#include "enff/core/parallel.hpp"
#include "enff/core/rng.hpp"
#include "enff/core/transition.hpp"
#include "enff/core/types.hpp"
#include "enff/flow/flow.hpp"
#include "enff/guidance/guidance.hpp"

namespace enff {

struct EnFFParams {
  FlowKind flow;
  GuidanceKind guidance;
};

/// eps_alpha = eps_beta = 1 is accepted as the frozen schedule (no drift, no noise).
struct EnSFParams {
  double eps_alpha = 0.5;
  double eps_beta = 0.025;
  /// Forces the damping c to zero. Test hook for unconditional generation.
  bool disable_guidance = false;
};

struct BPFParams {};
struct EnKFParams {};

using FilterAlgorithm = std::variant<EnFFParams, EnSFParams, BPFParams, EnKFParams>;

struct FilterConfig {
  FilterAlgorithm algorithm = BPFParams{};
  int T = 10;
  std::size_t N = 20;

  void validate() const;
  /// "enff", "ensf", "bpf" or "enkf".
  std::string name() const;
};

struct EnKFState {
  Matrix gain;
  Matrix cross_cov;
  Matrix obs_cov;
};

struct StepDiagnostics {
  double ess = std::numeric_limits<double>::quiet_NaN();
  bool regularized = false;
  std::vector<std::string> warnings;
  /// Filled by the dense EnKF path only.
  EnKFState enkf;
};

// Analysis-only entry points take the forecast ensemble (the targets) directly.
Ensemble enff_analysis(const FilterConfig& cfg, const Ensemble& prev, const Ensemble& forecast,
                       const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                       const Parallel& par = Parallel());
Ensemble ensf_analysis(const FilterConfig& cfg, const Ensemble& forecast,
                       const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                       const Parallel& par = Parallel());
Ensemble bpf_analysis(const Ensemble& forecast, const ObservationModel& obs, const ObsVec& y,
                      const RngSource& rng, StepDiagnostics* diag = nullptr);
Ensemble enkf_po_analysis(const Ensemble& forecast, const ObservationModel& obs, const ObsVec& y,
                          const RngSource& rng, StepDiagnostics* diag = nullptr);

Ensemble enff_step(const FilterConfig& cfg, const Ensemble& prev, const TransitionModel& trans,
                   const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                   const Parallel& par = Parallel());
Ensemble ensf_step(const FilterConfig& cfg, const Ensemble& prev, const TransitionModel& trans,
                   const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                   const Parallel& par = Parallel());
Ensemble bpf_step(const Ensemble& prev, const TransitionModel& trans, const ObservationModel& obs,
                  const ObsVec& y, const RngSource& rng, const Parallel& par = Parallel(),
                  StepDiagnostics* diag = nullptr);
Ensemble enkf_po_step(const Ensemble& prev, const TransitionModel& trans,
                      const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                      const Parallel& par = Parallel(), StepDiagnostics* diag = nullptr);

/// Dispatches on cfg.algorithm.
Ensemble filter_step(const FilterConfig& cfg, const Ensemble& prev, const TransitionModel& trans,
                     const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                     const Parallel& par = Parallel(), StepDiagnostics* diag = nullptr);

using Observations = std::vector<std::pair<std::size_t, ObsVec>>;
using StepCallback = std::function<void(const Ensemble& analysis, const StepDiagnostics& diag)>;

/// Runs DA steps init.step_index + 1 ... init.step_index + num_steps. Steps without an
/// observation only propagate. `on_step` sees every analysis ensemble in order.
void run_filter(const FilterConfig& cfg, const Ensemble& init, const TransitionModel& trans,
                const ObservationModel& obs, const Observations& observations,
                std::size_t num_steps, const RngSource& rng, const StepCallback& on_step,
                const Parallel& par = Parallel());

std::vector<Ensemble> run_filter(const FilterConfig& cfg, const Ensemble& init,
                                 const TransitionModel& trans, const ObservationModel& obs,
                                 const Observations& observations, std::size_t num_steps,
                                 const RngSource& rng, const Parallel& par = Parallel());

}  // namespace enff
