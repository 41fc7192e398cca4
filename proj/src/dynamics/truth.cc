/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/dynamics/truth.hpp"

#include <memory>

#include "enff/core/errors.hpp"

namespace enff {

void LinearGaussianConfig::validate() const {
  if (d < 1) throw ConfigError("linear system needs d >= 1");
  if (!std::isfinite(a) || !std::isfinite(m0)) throw ConfigError("linear system is not finite");
  if (!(c0 > 0.0)) throw ConfigError("linear system prior variance must be positive");
}

void Protocol::validate() const {
  if (total_steps < 1) throw ConfigError("total_steps must be positive");
  if (burn_in < 0 || burn_in >= total_steps)
    throw ConfigError("burn_in must be non-negative and below total_steps");
  if (observe_every < 1) throw ConfigError("observe_every must be positive");
  if (da_steps() < 1) throw ConfigError("protocol leaves no DA steps after burn-in");
  if (!(obs_noise_std > 0.0)) throw ConfigError("obs_noise_std must be positive");
  if (!(model_noise_std >= 0.0)) throw ConfigError("model_noise_std must be non-negative");
}

std::string system_name(const SystemConfig& cfg) {
  switch (cfg.index()) {
    case 0: return "lorenz96";
    case 1: return "ks";
    case 2: return "ns";
    default: return "linear";
  }
}

Protocol default_protocol(const SystemConfig& cfg) {
  Protocol p;
  switch (cfg.index()) {
    case 0: p = Protocol{1800, 1000, 10, 0.05, 0.0}; break;
    case 1: p = Protocol{6000, 2000, 10, 0.1, 0.0}; break;
    case 2: p = Protocol{6000, 0, 100, 0.1, 0.0}; break;
    default: p = Protocol{10, 0, 1, 1.0, 0.0}; break;
  }
  return p;
}

// -----------------------------------------------------------------------------

DynamicalSystem make_system(const SystemConfig& cfg) {
  DynamicalSystem sys;
  sys.name = system_name(cfg);
  if (const auto* c = std::get_if<Lorenz96Config>(&cfg)) {
    c->validate();
    const Lorenz96Config l = *c;
    sys.dim = l.d;
    sys.solver_step = [l](const StateVec& x) { return lorenz96_step(l, x); };
    sys.initial_condition = [l](RngStream& r) { return StateVec(3.0 * r.normal_vector(l.d)); };
  } else if (const auto* c = std::get_if<KSConfig>(&cfg)) {
    auto ws = std::make_shared<const KSWorkspace>(*c);
    const KSConfig k = *c;
    sys.dim = k.n;
    sys.solver_step = [k, ws](const StateVec& u) { return ks_step(k, *ws, u); };
    sys.initial_condition = [k, ws](RngStream& r) {
      StateVec u = ks_profile(k) + 0.01 * r.normal_vector(k.n);
      for (int s = 0; s < 150; ++s) u = ks_step(k, *ws, u);
      return u;
    };
  } else if (const auto* c = std::get_if<NSConfig>(&cfg)) {
    auto ws = std::make_shared<const NSWorkspace>(*c);
    const NSConfig k = *c;
    sys.dim = 3 * static_cast<Index>(k.n) * k.n;
    sys.solver_step = [k, ws](const StateVec& x) {
      return ns_pack(ns_step(k, *ws, ns_unpack(x, k.n)));
    };
    sys.initial_condition = [k, ws](RngStream& r) {
      return ns_pack(ns_project(*ws, gp_initial_condition(k, r)));
    };
  } else {
    const auto& l = std::get<LinearGaussianConfig>(cfg);
    l.validate();
    sys.dim = l.d;
    sys.solver_step = [l](const StateVec& x) { return StateVec(l.a * x); };
    sys.initial_condition = [l](RngStream& r) {
      return StateVec(StateVec::Constant(l.d, l.m0) + std::sqrt(l.c0) * r.normal_vector(l.d));
    };
  }
  return sys;
}

TransitionModel system_transition(const DynamicalSystem& sys, int steps, double model_noise_std) {
  if (steps < 1) throw ConfigError("DA interval needs at least one solver step");
  TransitionModel m;
  m.model_noise_std = model_noise_std;
  auto step = sys.solver_step;
  m.step = [step, steps](const StateVec& x) {
    StateVec y = x;
    for (int s = 0; s < steps; ++s) y = step(y);
    return y;
  };
  return m;
}

TruthRun make_truth_and_obs(const SystemConfig& cfg, const ObservationModel& obs,
                            const Protocol& protocol, const RngSource& rng) {
  protocol.validate();
  const DynamicalSystem sys = make_system(cfg);
  TruthRun run;
  RngStream init = rng.stream(0, 0, Purpose::TruthInit);
  StateVec x = sys.initial_condition(init);
  run.initial_condition = x;
  try {
    for (int s = 0; s < protocol.burn_in; ++s) x = sys.solver_step(x);
    run.truth.push_back(x);
    const int J = protocol.da_steps();
    for (int j = 1; j <= J; ++j) {
      for (int s = 0; s < protocol.observe_every; ++s) x = sys.solver_step(x);
      if (protocol.model_noise_std > 0.0) {
        RngStream noise = rng.stream(static_cast<std::uint64_t>(j), 0, Purpose::TruthModelNoise);
        x += protocol.model_noise_std * noise.normal_vector(x.size());
      }
      if (!all_finite(x)) throw BlowupError("non-finite truth state", j, -1, -1);
      run.truth.push_back(x);
      RngStream ostream = rng.stream(static_cast<std::uint64_t>(j), 0, Purpose::TruthObs);
      run.observations.emplace_back(static_cast<std::size_t>(j), observe(obs, x, ostream));
    }
  } catch (const BlowupError& e) {
    throw BlowupError(sys.name + " truth generation blew up: " + e.what(), e.da_step(), -1, -1);
  }
  return run;
}

}  // namespace enff
