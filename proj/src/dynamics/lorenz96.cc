/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/dynamics/lorenz96.hpp"

#include "enff/core/errors.hpp"

namespace enff {

void Lorenz96Config::validate() const {
  if (d < 4) throw ConfigError("Lorenz '96 needs d >= 4");
  if (!(dt > 0.0)) throw ConfigError("Lorenz '96 dt must be positive");
  if (steps_per_da < 1) throw ConfigError("steps_per_da must be at least 1");
}

StateVec lorenz96_rhs(const Lorenz96Config& cfg, const StateVec& x) {
  const Index d = x.size();
  if (d != cfg.d) throw ConfigError("Lorenz '96 state has the wrong dimension");
  StateVec f(d);
  for (Index i = 0; i < d; ++i) {
    const double xp1 = x[(i + 1) % d];
    const double xm1 = x[(i + d - 1) % d];
    const double xm2 = x[(i + d - 2) % d];
    f[i] = (xp1 - xm2) * xm1 - x[i] + cfg.forcing;
  }
  return f;
}

StateVec lorenz96_step(const Lorenz96Config& cfg, const StateVec& x) {
  const double h = cfg.dt;
  const StateVec k1 = lorenz96_rhs(cfg, x);
  const StateVec k2 = lorenz96_rhs(cfg, x + 0.5 * h * k1);
  const StateVec k3 = lorenz96_rhs(cfg, x + 0.5 * h * k2);
  const StateVec k4 = lorenz96_rhs(cfg, x + h * k3);
  StateVec out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!all_finite(out)) throw BlowupError("Lorenz '96 step produced a non-finite state", -1, -1, -1);
  return out;
}

TransitionModel lorenz96_transition(const Lorenz96Config& cfg, double model_noise_std) {
  cfg.validate();
  TransitionModel m;
  m.model_noise_std = model_noise_std;
  m.step = [cfg](const StateVec& x) {
    StateVec y = x;
    for (int s = 0; s < cfg.steps_per_da; ++s) y = lorenz96_step(cfg, y);
    return y;
  };
  return m;
}

}  // namespace enff
