/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include "enff/core/transition.hpp"
#include "enff/core/types.hpp"

namespace enff {

struct Lorenz96Config {
  Index d = 40;
  double forcing = 8.0;
  double dt = 0.01;
  int steps_per_da = 10;

  void validate() const;
};

/// dx_i/dt = (x_{i+1} - x_{i-2}) x_{i-1} - x_i + b, indices cyclic.
StateVec lorenz96_rhs(const Lorenz96Config& cfg, const StateVec& x);

/// One classical RK4 step of size cfg.dt.
StateVec lorenz96_step(const Lorenz96Config& cfg, const StateVec& x);

TransitionModel lorenz96_transition(const Lorenz96Config& cfg, double model_noise_std = 0.0);

}  // namespace enff
