/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <string>

#include "enff/core/errors.hpp"
#include "enff/core/numerics.hpp"
#include "enff/filters/filters.hpp"

namespace enff {

Ensemble enff_analysis(const FilterConfig& cfg, const Ensemble& prev, const Ensemble& forecast,
                       const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                       const Parallel& par) {
  cfg.validate();
  const auto& p = std::get<EnFFParams>(cfg.algorithm);
  forecast.validate();
  const std::size_t N = forecast.size();
  const Index d = forecast.dim();
  const std::size_t j = forecast.step_index;

  Matrix Z0;
  if (p.flow.type == FlowType::F2P) {
    prev.validate();
    if (prev.size() != N || prev.dim() != d)
      throw ConfigError("F2P needs the previous ensemble with the forecast's shape");
    Z0 = stack_rows(prev.members);
  } else {
    Z0.resize(static_cast<Index>(N), d);
    for (std::size_t n = 0; n < N; ++n) {
      RngStream s = rng.stream(j, n, Purpose::Reference);
      Z0.row(static_cast<Index>(n)) = s.normal_vector(d).transpose();
    }
  }
  const CoupledPairSet pairs(p.flow, std::move(Z0), stack_rows(forecast.members));

  Eigen::ArrayXd tilt;
  if (p.guidance.type == GuidanceType::MC) tilt = likelihood_tilt(pairs, obs, y);
  const Eigen::ArrayXd* shared = p.guidance.type == GuidanceType::MC ? &tilt : nullptr;

  Ensemble out;
  out.step_index = j;
  out.members.resize(N);
  par.for_each(N, [&](std::size_t n) {
    RngStream s = rng.stream(j, n, Purpose::FlowInit);
    const StateVec z0 =
        p.flow.type == FlowType::F2P ? prev.members[n] : StateVec(StateVec::Zero(d));
    const StateVec init = sample_initial(p.flow, z0, s);
    GuidedField field(pairs, obs, y, p.guidance, shared);
    try {
      FlowResult r = integrate_flow([&](const StateVec& z, double t) { return field(z, t); },
                                    init, cfg.T, false);
      out.members[n] = std::move(r.endpoint);
    } catch (const IntegrationBlowup& e) {
      throw FilterDivergence(static_cast<long>(j), static_cast<long>(n), e.inner_step(), "EnFF");
    }
  });
  return out;
}

Ensemble enff_step(const FilterConfig& cfg, const Ensemble& prev, const TransitionModel& trans,
                   const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                   const Parallel& par) {
  if (prev.size() != cfg.N) throw ConfigError("ensemble size differs from the filter config");
  const Ensemble forecast = propagate(trans, prev, rng, par);
  return enff_analysis(cfg, prev, forecast, obs, y, rng, par);
}

}  // namespace enff
