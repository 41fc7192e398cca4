/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/dynamics/kuramoto_sivashinsky.hpp"

#include <cmath>
#include <complex>

#include "enff/core/errors.hpp"

namespace enff {

KSConfig KSConfig::desk() {
  KSConfig c;
  c.n = 128;
  c.length = 16.0 * std::numbers::pi;
  return c;
}

void KSConfig::validate() const {
  if (n < 8 || !is_power_of_two(n)) throw ConfigError("KS grid must be a power of two >= 8");
  if (!(length > 0.0)) throw ConfigError("KS domain length must be positive");
  if (!(dt > 0.0)) throw ConfigError("KS dt must be positive");
  if (steps_per_da < 1) throw ConfigError("steps_per_da must be at least 1");
}

// Coefficients follow Kassam and Trefethen: each phi-function is averaged over
// M = 32 points on a unit circle centred at h*L(k), which stays accurate where
// h*L(k) is near zero.
KSWorkspace::KSWorkspace(const KSConfig& cfg) : cfg_(cfg), fft_((cfg.validate(), static_cast<int>(cfg.n))) {
  const Index m = cfg.n / 2 + 1;
  const double h = cfg.dt;
  const double dk = 2.0 * std::numbers::pi / cfg.length;
  const Index cutoff = cfg.n / 3;
  k_.resize(m);
  lin_.resize(m);
  E_.resize(m);
  E2_.resize(m);
  Q_.resize(m);
  f1_.resize(m);
  f2_.resize(m);
  f3_.resize(m);
  g_.resize(m);

  constexpr int M = 32;
  for (Index i = 0; i < m; ++i) {
    const double k = dk * static_cast<double>(i);
    k_[i] = k;
    lin_[i] = k * k - k * k * k * k;
    const double hl = h * lin_[i];
    E_[i] = std::exp(hl);
    E2_[i] = std::exp(hl / 2.0);
    std::complex<double> q = 0.0, a = 0.0, b = 0.0, c = 0.0;
    for (int j = 1; j <= M; ++j) {
      const std::complex<double> r =
          hl + std::exp(std::complex<double>(0.0, std::numbers::pi * (j - 0.5) / M));
      const std::complex<double> er = std::exp(r);
      const std::complex<double> r3 = r * r * r;
      q += (std::exp(r / 2.0) - 1.0) / r;
      a += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
      b += (2.0 + r + er * (-2.0 + r)) / r3;
      c += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
    }
    Q_[i] = h * (q / static_cast<double>(M)).real();
    f1_[i] = h * (a / static_cast<double>(M)).real();
    f2_[i] = h * (b / static_cast<double>(M)).real();
    f3_[i] = h * (c / static_cast<double>(M)).real();
    g_[i] = i <= cutoff ? std::complex<double>(0.0, -0.5 * k) : std::complex<double>(0.0, 0.0);
  }
}

namespace {

void nonlinear(const KSWorkspace& ws, const Eigen::ArrayXcd& v, Eigen::ArrayXd& phys,
               Eigen::ArrayXcd& out) {
  ws.fft().inverse(v.data(), phys.data());
  phys = phys.square();
  ws.fft().forward(phys.data(), out.data());
  out *= ws.nonlinear_factor();
}

}  // namespace

StateVec ks_step(const KSConfig& cfg, const KSWorkspace& ws, const StateVec& u) {
  if (u.size() != cfg.n) throw ConfigError("KS state has the wrong length");
  const Index m = ws.modes();
  Eigen::ArrayXd phys(cfg.n);
  Eigen::ArrayXcd v(m), Nv(m), a(m), Na(m), b(m), Nb(m), c(m), Nc(m);
  ws.fft().forward(u.data(), v.data());

  nonlinear(ws, v, phys, Nv);
  a = ws.E2() * v + ws.Q() * Nv;
  nonlinear(ws, a, phys, Na);
  b = ws.E2() * v + ws.Q() * Na;
  nonlinear(ws, b, phys, Nb);
  c = ws.E2() * a + ws.Q() * (2.0 * Nb - Nv);
  nonlinear(ws, c, phys, Nc);
  v = ws.E() * v + Nv * ws.f1() + 2.0 * (Na + Nb) * ws.f2() + Nc * ws.f3();

  StateVec out(cfg.n);
  ws.fft().inverse(v.data(), out.data());
  if (!all_finite(out)) throw BlowupError("KS step produced a non-finite state", -1, -1, -1);
  return out;
}

StateVec ks_profile(const KSConfig& cfg) {
  StateVec u(cfg.n);
  for (Index i = 0; i < cfg.n; ++i) {
    const double x = cfg.length * static_cast<double>(i) / static_cast<double>(cfg.n);
    const double th = 2.0 * std::numbers::pi * x / cfg.length;
    u[i] = std::cos(th) * (1.0 + std::sin(th));
  }
  return u;
}

}  // namespace enff
