/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/core/numerics.hpp"

#include <cmath>
#include <limits>

namespace enff {

double softmax_inplace(Eigen::ArrayXd& logw) {
  const double m = logw.maxCoeff();
  if (!std::isfinite(m)) {
    // Everything -inf (or a +inf/NaN sneaked in): fall back to uniform so callers see
    // a finite field and the offending state is caught by their blowup checks.
    logw.setConstant(1.0 / static_cast<double>(logw.size()));
    return m;
  }
  // exp is very slow on x86 when its result is subnormal, so those entries are computed
  // on a clamped argument and then zeroed. They weigh below 1e-304 next to the leading 1.
  static const double floor = std::exp(-700.0);
  logw = (logw - m).max(-700.0).exp();
  logw = (logw <= floor).select(0.0, logw);
  const double s = logw.sum();
  logw /= s;
  return m + std::log(s);
}

double log_sum_exp(const Eigen::ArrayXd& logw) {
  const double m = logw.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((logw - m).exp().sum());
}

StateVec column_mean(const Matrix& X) { return X.rowwise().mean(); }

Matrix sample_covariance(const Matrix& X, const Matrix& Y) {
  const Matrix Xc = X.colwise() - X.rowwise().mean();
  const Matrix Yc = Y.colwise() - Y.rowwise().mean();
  return Xc * Yc.transpose() / static_cast<double>(X.cols());
}

Matrix stack_rows(const std::vector<StateVec>& v) {
  if (v.empty()) return Matrix();
  Matrix M(static_cast<Index>(v.size()), v.front().size());
  for (std::size_t n = 0; n < v.size(); ++n) M.row(static_cast<Index>(n)) = v[n].transpose();
  return M;
}

}  // namespace enff
