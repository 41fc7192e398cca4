/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>

#include "enff/core/errors.hpp"
#include "enff/core/numerics.hpp"
#include "enff/filters/filters.hpp"

namespace enff {

// Reverse-time Euler-Maruyama in diffusion time tau = 1 - t, from tau = 1 (noise) down
// to tau = 0 (data). With a = 1 - (1 - ea) tau and b^2 = eb + (1 - eb) tau the forward
// SDE dx = f x dtau + g dW has f = d log a / dtau and g^2 = d b^2 / dtau - 2 f b^2.
// The score is that of the mixture sum_n N(x | a xhat_n, b^2 I); the likelihood
// gradient enters damped by c(tau) = 1 - tau.
Ensemble ensf_analysis(const FilterConfig& cfg, const Ensemble& forecast,
                       const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                       const Parallel& par) {
  cfg.validate();
  const auto& p = std::get<EnSFParams>(cfg.algorithm);
  forecast.validate();
  const std::size_t N = forecast.size();
  const Index d = forecast.dim();
  const std::size_t j = forecast.step_index;
  const Matrix X = stack_rows(forecast.members);
  const double ea = p.eps_alpha;
  const double eb = p.eps_beta;
  const double dtau = 1.0 / static_cast<double>(cfg.T);

  Ensemble out;
  out.step_index = j;
  out.members.resize(N);
  par.for_each(N, [&](std::size_t n) {
    RngStream s = rng.stream(j, n, Purpose::SdeNoise);
    StateVec x = s.normal_vector(d);
    Eigen::ArrayXd w(X.rows());
    StateVec xbar(d);
    for (int k = 0; k < cfg.T; ++k) {
      const double tau = 1.0 - static_cast<double>(k) * dtau;
      const double a = 1.0 - (1.0 - ea) * tau;
      const double b2 = eb + (1.0 - eb) * tau;
      const double f = -(1.0 - ea) / a;
      const double g2 = (1.0 - eb) - 2.0 * f * b2;

      w.setZero();
      for (Index i = 0; i < d; ++i) w += (x[i] - a * X.col(i).array()).square();
      w *= -0.5 / b2;
      softmax_inplace(w);
      xbar.noalias() = X.transpose() * w.matrix();
      StateVec score = (a * xbar - x) / b2;
      const double c = 1.0 - tau;
      if (!p.disable_guidance && c > 0.0) score -= c * obs.grad_energy(x, y);

      x -= dtau * (f * x - g2 * score);
      if (g2 > 0.0) {
        const double amp = std::sqrt(g2 * dtau);
        for (Index i = 0; i < d; ++i) x[i] += amp * s.normal();
      }
      if (!all_finite(x))
        throw FilterDivergence(static_cast<long>(j), static_cast<long>(n), k + 1, "EnSF");
    }
    out.members[n] = std::move(x);
  });
  return out;
}

Ensemble ensf_step(const FilterConfig& cfg, const Ensemble& prev, const TransitionModel& trans,
                   const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                   const Parallel& par) {
  if (prev.size() != cfg.N) throw ConfigError("ensemble size differs from the filter config");
  return ensf_analysis(cfg, propagate(trans, prev, rng, par), obs, y, rng, par);
}

}  // namespace enff
