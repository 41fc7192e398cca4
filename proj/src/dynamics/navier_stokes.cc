/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/dynamics/navier_stokes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "enff/core/errors.hpp"

namespace enff {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

std::size_t grid_size(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }

}  // namespace

void NSConfig::validate() const {
  if (n < 4 || !is_power_of_two(n)) throw ConfigError("NS grid must be a power of two >= 4");
  if (!(length > 0.0)) throw ConfigError("NS domain length must be positive");
  if (!(nu > 0.0)) throw ConfigError("NS viscosity must be positive");
  if (!(dt > 0.0)) throw ConfigError("NS dt must be positive");
  if (steps_per_da < 1) throw ConfigError("steps_per_da must be at least 1");
  if (!(gp_lengthscale > 0.0)) throw ConfigError("GP lengthscale must be positive");
}

NSWorkspace::NSWorkspace(const NSConfig& cfg) : cfg_(cfg), fft_((cfg.validate(), cfg.n)) {
  const int n = cfg.n;
  const int h = half();
  const double dk = 2.0 * kPi / cfg.length;
  kx_.resize(static_cast<std::size_t>(n));
  ky_.resize(static_cast<std::size_t>(h));
  lap_.resize(static_cast<std::size_t>(n * h));
  mask_.resize(static_cast<std::size_t>(n * h));
  const int cutoff = n / 3;
  for (int i = 0; i < n; ++i) kx_[i] = i == n / 2 ? 0.0 : dk * signed_mode(i, n);
  for (int j = 0; j < h; ++j) ky_[j] = j == n / 2 ? 0.0 : dk * j;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      const double ax = dk * signed_mode(i, n);
      const double ay = dk * j;
      lap_[static_cast<std::size_t>(i * h + j)] = ax * ax + ay * ay;
      mask_[static_cast<std::size_t>(i * h + j)] =
          std::abs(signed_mode(i, n)) <= cutoff && j <= cutoff;
    }
  }
  std::vector<double> f(grid_size(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x2 = cfg.length * j / n;
      f[static_cast<std::size_t>(i * n + j)] =
          cfg.forcing_amplitude * std::sin(2.0 * kPi * cfg.forcing_mode * x2 / cfg.length);
    }
  fu_hat_.resize(static_cast<std::size_t>(n * h));
  fft_.forward(f.data(), fu_hat_.data());
}

namespace {

void check_fields(const NSWorkspace& ws, const NSFields& s) {
  const std::size_t m = grid_size(ws.n());
  if (s.u.size() != m || s.v.size() != m || s.p.size() != m)
    throw ConfigError("NS fields do not match the grid");
}

// Removes the gradient part of (uh, vh) in place and returns the pressure-like
// potential phi with u = u_div + grad(phi).
void project_hat(const NSWorkspace& ws, std::vector<Complex>& uh, std::vector<Complex>& vh,
                 std::vector<Complex>* phi) {
  const int n = ws.n();
  const int h = ws.half();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      const std::size_t q = static_cast<std::size_t>(i * h + j);
      const double kx = ws.kx(i);
      const double ky = ws.ky(j);
      const double k2 = kx * kx + ky * ky;
      Complex ph = 0.0;
      if (k2 > 0.0) {
        ph = -kI * (kx * uh[q] + ky * vh[q]) / k2;
        uh[q] -= kI * kx * ph;
        vh[q] -= kI * ky * ph;
      }
      if (phi) (*phi)[q] = ph;
    }
  }
}

}  // namespace

NSFields ns_step(const NSConfig& cfg, const NSWorkspace& ws, const NSFields& s) {
  check_fields(ws, s);
  const int n = ws.n();
  const int h = ws.half();
  const std::size_t m = grid_size(n);
  const std::size_t ms = static_cast<std::size_t>(n * h);
  const double dt = cfg.dt;

  std::vector<Complex> uh(ms), vh(ms), uu(ms), uv(ms), vv(ms);
  ws.fft().forward(s.u.data(), uh.data());
  ws.fft().forward(s.v.data(), vh.data());
  std::vector<double> prod(m);
  for (std::size_t q = 0; q < m; ++q) prod[q] = s.u[q] * s.u[q];
  ws.fft().forward(prod.data(), uu.data());
  for (std::size_t q = 0; q < m; ++q) prod[q] = s.u[q] * s.v[q];
  ws.fft().forward(prod.data(), uv.data());
  for (std::size_t q = 0; q < m; ++q) prod[q] = s.v[q] * s.v[q];
  ws.fft().forward(prod.data(), vv.data());

  const auto& fu = ws.forcing_hat();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      const std::size_t q = static_cast<std::size_t>(i * h + j);
      const double kx = ws.kx(i);
      const double ky = ws.ky(j);
      Complex adv_u = 0.0, adv_v = 0.0;
      if (ws.keep(i, j)) {
        adv_u = kI * (kx * uu[q] + ky * uv[q]);
        adv_v = kI * (kx * uv[q] + ky * vv[q]);
      }
      const double lap = ws.lap(i, j);
      uh[q] += dt * (-adv_u - cfg.nu * lap * uh[q] + fu[q]);
      vh[q] += dt * (-adv_v - cfg.nu * lap * vh[q]);
    }
  }

  // grad(phi) removed from u* equals dt grad(p), so p = phi / dt.
  std::vector<Complex> phi(ms);
  project_hat(ws, uh, vh, &phi);
  for (auto& c : phi) c /= dt;

  NSFields out;
  out.u.resize(m);
  out.v.resize(m);
  out.p.resize(m);
  ws.fft().inverse(uh.data(), out.u.data());
  ws.fft().inverse(vh.data(), out.v.data());
  ws.fft().inverse(phi.data(), out.p.data());
  auto finite = [](const std::vector<double>& a) {
    return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(out.u) || !finite(out.v) || !finite(out.p))
    throw BlowupError("NS step produced a non-finite state", -1, -1, -1);
  return out;
}

NSFields ns_project(const NSWorkspace& ws, const NSFields& s) {
  check_fields(ws, s);
  const std::size_t ms = static_cast<std::size_t>(ws.n() * ws.half());
  std::vector<Complex> uh(ms), vh(ms);
  ws.fft().forward(s.u.data(), uh.data());
  ws.fft().forward(s.v.data(), vh.data());
  project_hat(ws, uh, vh, nullptr);
  NSFields out = s;
  ws.fft().inverse(uh.data(), out.u.data());
  ws.fft().inverse(vh.data(), out.v.data());
  return out;
}

double ns_max_divergence(const NSWorkspace& ws, const NSFields& s) {
  check_fields(ws, s);
  const int n = ws.n();
  const int h = ws.half();
  const std::size_t ms = static_cast<std::size_t>(n * h);
  std::vector<Complex> uh(ms), vh(ms), dh(ms);
  ws.fft().forward(s.u.data(), uh.data());
  ws.fft().forward(s.v.data(), vh.data());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < h; ++j) {
      const std::size_t q = static_cast<std::size_t>(i * h + j);
      dh[q] = kI * (ws.kx(i) * uh[q] + ws.ky(j) * vh[q]);
    }
  std::vector<double> div(grid_size(n));
  ws.fft().inverse(dh.data(), div.data());
  double mx = 0.0;
  for (double d : div) mx = std::max(mx, std::abs(d));
  return mx;
}

double ns_kinetic_energy(const NSFields& s) {
  double e = 0.0;
  for (std::size_t q = 0; q < s.u.size(); ++q) e += 0.5 * (s.u[q] * s.u[q] + s.v[q] * s.v[q]);
  return e / static_cast<double>(s.u.size());
}

StateVec ns_pack(const NSFields& s) {
  const Index m = static_cast<Index>(s.u.size());
  StateVec x(3 * m);
  for (Index q = 0; q < m; ++q) {
    x[q] = s.u[static_cast<std::size_t>(q)];
    x[m + q] = s.v[static_cast<std::size_t>(q)];
    x[2 * m + q] = s.p[static_cast<std::size_t>(q)];
  }
  return x;
}

NSFields ns_unpack(const StateVec& x, int n) {
  const Index m = static_cast<Index>(grid_size(n));
  if (x.size() != 3 * m) throw ConfigError("NS state has the wrong length");
  NSFields s;
  s.u.assign(x.data(), x.data() + m);
  s.v.assign(x.data() + m, x.data() + 2 * m);
  s.p.assign(x.data() + 2 * m, x.data() + 3 * m);
  return s;
}

NSFields gp_initial_condition(const NSConfig& cfg, RngStream& rng) {
  cfg.validate();
  const int n = cfg.n;
  const double l = cfg.gp_lengthscale;
  // Keep modes whose spectral weight exceeds ~1e-16 and that the grid resolves.
  const double wmax = std::sqrt(std::log(1e16) / (2.0 * kPi * kPi * l * l));
  const int K = std::min(n / 2 - 1, static_cast<int>(std::ceil(wmax * cfg.length)));

  std::vector<Complex> cu(grid_size(n), 0.0), cv(grid_size(n), 0.0);
  for (int m1 = 0; m1 <= K; ++m1) {
    for (int m2 = -K; m2 <= K; ++m2) {
      if (m1 == 0 && m2 < 0) continue;  // half plane: (w, -w) give the same features
      const double w2 = (static_cast<double>(m1) * m1 + static_cast<double>(m2) * m2) /
                        (cfg.length * cfg.length);
      const double sd = std::sqrt(std::exp(-2.0 * kPi * kPi * l * l * w2));
      const std::size_t q =
          static_cast<std::size_t>(((m1 % n) + n) % n) * static_cast<std::size_t>(n) +
          static_cast<std::size_t>(((m2 % n) + n) % n);
      const double a1 = sd * rng.normal(), b1 = sd * rng.normal();
      const double a2 = sd * rng.normal(), b2 = sd * rng.normal();
      // Re((a - i b) e^{i theta}) = a cos(theta) + b sin(theta)
      cu[q] = Complex(a1, -b1);
      cv[q] = Complex(a2, -b2);
    }
  }
  const ComplexFFT2D fft(n);
  std::vector<Complex> out(grid_size(n));
  NSFields s;
  s.u.resize(grid_size(n));
  s.v.resize(grid_size(n));
  s.p.assign(grid_size(n), 0.0);
  fft.backward(cu.data(), out.data());
  for (std::size_t q = 0; q < out.size(); ++q) s.u[q] = out[q].real();
  fft.backward(cv.data(), out.data());
  for (std::size_t q = 0; q < out.size(); ++q) s.v[q] = out[q].real();
  return s;
}

}  // namespace enff
