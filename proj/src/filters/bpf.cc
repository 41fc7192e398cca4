/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/core/errors.hpp"
#include "enff/core/numerics.hpp"
#include "enff/filters/filters.hpp"

namespace enff {

Ensemble bpf_analysis(const Ensemble& forecast, const ObservationModel& obs, const ObsVec& y,
                      const RngSource& rng, StepDiagnostics* diag) {
  forecast.validate();
  const std::size_t N = forecast.size();
  Eigen::ArrayXd w(static_cast<Index>(N));
  for (std::size_t n = 0; n < N; ++n) w[static_cast<Index>(n)] = -obs.energy(forecast.members[n], y);
  softmax_inplace(w);
  if (diag) diag->ess = 1.0 / w.square().sum();

  // Systematic resampling: one uniform, N evenly spaced positions.
  RngStream s = rng.stream(forecast.step_index, 0, Purpose::Resample);
  const double u = s.uniform();
  Eigen::ArrayXd cum(static_cast<Index>(N));
  double acc = 0.0;
  for (Index n = 0; n < static_cast<Index>(N); ++n) cum[n] = (acc += w[n]);
  cum[static_cast<Index>(N) - 1] = 1.0;

  Ensemble out;
  out.step_index = forecast.step_index;
  out.members.reserve(N);
  Index k = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double pos = (u + static_cast<double>(i)) / static_cast<double>(N);
    while (k < static_cast<Index>(N) - 1 && cum[k] <= pos) ++k;
    out.members.push_back(forecast.members[static_cast<std::size_t>(k)]);
  }
  return out;
}

Ensemble bpf_step(const Ensemble& prev, const TransitionModel& trans, const ObservationModel& obs,
                  const ObsVec& y, const RngSource& rng, const Parallel& par,
                  StepDiagnostics* diag) {
  return bpf_analysis(propagate(trans, prev, rng, par), obs, y, rng, diag);
}

}  // namespace enff
