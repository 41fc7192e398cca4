/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <complex>
#include <vector>

namespace enff {

using Complex = std::complex<double>;

/// Thin FFTW wrappers. Plans are made once (under a global planner lock) and executed
/// through the new-array interface, so one instance can serve several threads as long
/// as each caller brings its own buffers. Inverse transforms are normalised.
class RealFFT1D {
 public:
  explicit RealFFT1D(int n);
  ~RealFFT1D();
  RealFFT1D(const RealFFT1D&) = delete;
  RealFFT1D& operator=(const RealFFT1D&) = delete;

  int size() const { return n_; }
  int spectral_size() const { return n_ / 2 + 1; }

  void forward(const double* in, Complex* out) const;
  /// `in` is copied before the transform, so it is left untouched.
  void inverse(const Complex* in, double* out) const;

 private:
  int n_;
  void* fwd_;
  void* inv_;
};

/// n x n real field stored row-major, index i * n + j. Spectra are n x (n/2 + 1).
class RealFFT2D {
 public:
  explicit RealFFT2D(int n);
  ~RealFFT2D();
  RealFFT2D(const RealFFT2D&) = delete;
  RealFFT2D& operator=(const RealFFT2D&) = delete;

  int size() const { return n_; }
  int spectral_size() const { return n_ * (n_ / 2 + 1); }

  void forward(const double* in, Complex* out) const;
  void inverse(const Complex* in, double* out) const;

 private:
  int n_;
  void* fwd_;
  void* inv_;
};

/// Unnormalised complex n x n backward transform sum_k X_k exp(+i 2 pi k.x / n).
class ComplexFFT2D {
 public:
  explicit ComplexFFT2D(int n);
  ~ComplexFFT2D();
  ComplexFFT2D(const ComplexFFT2D&) = delete;
  ComplexFFT2D& operator=(const ComplexFFT2D&) = delete;

  void backward(const Complex* in, Complex* out) const;

 private:
  int n_;
  void* plan_;
};

/// Integer wavenumber for FFT index i of an n-point transform (0..n/2, then negative).
inline int signed_mode(int i, int n) { return i <= n / 2 ? i : i - n; }

bool is_power_of_two(long n);

}  // namespace enff
