/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <string>

#include "enff/core/errors.hpp"
#include "enff/filters/filters.hpp"

namespace enff {

Ensemble filter_step(const FilterConfig& cfg, const Ensemble& prev, const TransitionModel& trans,
                     const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                     const Parallel& par, StepDiagnostics* diag) {
  if (std::holds_alternative<EnFFParams>(cfg.algorithm))
    return enff_step(cfg, prev, trans, obs, y, rng, par);
  if (std::holds_alternative<EnSFParams>(cfg.algorithm))
    return ensf_step(cfg, prev, trans, obs, y, rng, par);
  if (std::holds_alternative<BPFParams>(cfg.algorithm))
    return bpf_step(prev, trans, obs, y, rng, par, diag);
  return enkf_po_step(prev, trans, obs, y, rng, par, diag);
}

void run_filter(const FilterConfig& cfg, const Ensemble& init, const TransitionModel& trans,
                const ObservationModel& obs, const Observations& observations,
                std::size_t num_steps, const RngSource& rng, const StepCallback& on_step,
                const Parallel& par) {
  cfg.validate();
  init.validate();
  if (init.size() != cfg.N) throw ConfigError("initial ensemble size differs from the config");
  const std::size_t first = init.step_index + 1;
  const std::size_t last = init.step_index + num_steps;
  for (std::size_t k = 0; k < observations.size(); ++k) {
    if (k > 0 && observations[k].first <= observations[k - 1].first)
      throw ConfigError("observation steps must be strictly increasing");
    if (observations[k].first < first || observations[k].first > last)
      throw ConfigError("observation step " + std::to_string(observations[k].first) +
                        " outside the run window");
  }

  Ensemble current = init;
  std::size_t next_obs = 0;
  for (std::size_t j = first; j <= last; ++j) {
    StepDiagnostics diag;
    if (next_obs < observations.size() && observations[next_obs].first == j) {
      current = filter_step(cfg, current, trans, obs, observations[next_obs].second, rng, par, &diag);
      ++next_obs;
    } else {
      current = propagate(trans, current, rng, par);
    }
    if (on_step) on_step(current, diag);
  }
}

std::vector<Ensemble> run_filter(const FilterConfig& cfg, const Ensemble& init,
                                 const TransitionModel& trans, const ObservationModel& obs,
                                 const Observations& observations, std::size_t num_steps,
                                 const RngSource& rng, const Parallel& par) {
  std::vector<Ensemble> out;
  out.reserve(num_steps);
  run_filter(
      cfg, init, trans, obs, observations, num_steps, rng,
      [&](const Ensemble& e, const StepDiagnostics&) { out.push_back(e); }, par);
  return out;
}

}  // namespace enff
