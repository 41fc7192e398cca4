/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/dynamics/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "enff/core/errors.hpp"

namespace enff {

namespace {

// FFTW's planner is not re-entrant; only fftw_execute* may run concurrently.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

// -----------------------------------------------------------------------------

RealFFT1D::RealFFT1D(int n) : n_(n) {
  if (n < 2) throw ConfigError("FFT length must be at least 2");
  std::vector<double> r(static_cast<std::size_t>(n));
  std::vector<Complex> c(static_cast<std::size_t>(spectral_size()));
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_ = fftw_plan_dft_r2c_1d(n, r.data(), as_fftw(c.data()), kFlags);
  inv_ = fftw_plan_dft_c2r_1d(n, as_fftw(c.data()), r.data(), kFlags);
}

RealFFT1D::~RealFFT1D() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void RealFFT1D::forward(const double* in, Complex* out) const {
  std::vector<double> tmp(in, in + n_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), tmp.data(), as_fftw(out));
}

void RealFFT1D::inverse(const Complex* in, double* out) const {
  std::vector<Complex> tmp(in, in + spectral_size());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), as_fftw(tmp.data()), out);
  const double s = 1.0 / n_;
  std::for_each(out, out + n_, [s](double& v) { v *= s; });
}

// -----------------------------------------------------------------------------

RealFFT2D::RealFFT2D(int n) : n_(n) {
  if (n < 2) throw ConfigError("FFT length must be at least 2");
  std::vector<double> r(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  std::vector<Complex> c(static_cast<std::size_t>(spectral_size()));
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_ = fftw_plan_dft_r2c_2d(n, n, r.data(), as_fftw(c.data()), kFlags);
  inv_ = fftw_plan_dft_c2r_2d(n, n, as_fftw(c.data()), r.data(), kFlags);
}

RealFFT2D::~RealFFT2D() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void RealFFT2D::forward(const double* in, Complex* out) const {
  std::vector<double> tmp(in, in + static_cast<std::size_t>(n_) * n_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), tmp.data(), as_fftw(out));
}

void RealFFT2D::inverse(const Complex* in, double* out) const {
  std::vector<Complex> tmp(in, in + spectral_size());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), as_fftw(tmp.data()), out);
  const double s = 1.0 / (static_cast<double>(n_) * n_);
  std::for_each(out, out + static_cast<std::size_t>(n_) * n_, [s](double& v) { v *= s; });
}

// -----------------------------------------------------------------------------

ComplexFFT2D::ComplexFFT2D(int n) : n_(n) {
  if (n < 2) throw ConfigError("FFT length must be at least 2");
  std::vector<Complex> a(static_cast<std::size_t>(n) * n), b(a.size());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_ = fftw_plan_dft_2d(n, n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, kFlags);
}

ComplexFFT2D::~ComplexFFT2D() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void ComplexFFT2D::backward(const Complex* in, Complex* out) const {
  std::vector<Complex> tmp(in, in + static_cast<std::size_t>(n_) * n_);
  fftw_execute_dft(static_cast<fftw_plan>(plan_), as_fftw(tmp.data()), as_fftw(out));
}

}  // namespace enff
