/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <string>

#include "enff/core/errors.hpp"
#include "enff/core/numerics.hpp"
#include "enff/filters/filters.hpp"

namespace enff {

namespace {

// Above this observation dimension the gain is applied in ensemble space instead of
// forming d_y x d_y matrices.
constexpr Index kDenseObsLimit = 2000;

bool singular(const Eigen::LDLT<Matrix>& ldlt) {
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return true;
  const auto D = ldlt.vectorD().cwiseAbs();
  return !(D.minCoeff() > 1e-12 * D.maxCoeff()) || D.maxCoeff() == 0.0;
}

}  // namespace

Ensemble enkf_po_analysis(const Ensemble& forecast, const ObservationModel& obs, const ObsVec& y,
                          const RngSource& rng, StepDiagnostics* diag) {
  forecast.validate();
  const std::size_t N = forecast.size();
  if (N < 2) throw ConfigError("EnKF-PO needs at least two members");
  const Index d = forecast.dim();
  const Index dy = obs.obs_dim(d);
  if (y.size() != dy) throw ConfigError("observation dimension mismatch");
  const double Nd = static_cast<double>(N);
  const double s2 = obs.sigma() * obs.sigma();

  const Matrix X = forecast.as_matrix();
  Matrix Y(dy, static_cast<Index>(N));
  for (std::size_t n = 0; n < N; ++n) {
    RngStream s = rng.stream(forecast.step_index, n, Purpose::PerturbedObs);
    Y.col(static_cast<Index>(n)) = observe(obs, forecast.members[n], s);
  }
  const Matrix Xc = X.colwise() - X.rowwise().mean();
  const Matrix Yc = Y.colwise() - Y.rowwise().mean();
  const Matrix innov = (-Y).colwise() + y;  // y - yhat_n, one column per member

  Ensemble out;
  out.step_index = forecast.step_index;
  out.members.resize(N);
  auto warn = [&](const std::string& msg) {
    if (diag) {
      diag->regularized = true;
      diag->warnings.push_back(msg);
    }
  };

  if (dy <= kDenseObsLimit && dy < static_cast<Index>(N)) {
    const Matrix Cxy = Xc * Yc.transpose() / Nd;
    Matrix Cyy = Yc * Yc.transpose() / Nd;
    Eigen::LDLT<Matrix> ldlt(Cyy);
    if (singular(ldlt)) {
      warn("EnKF-PO: singular observation covariance at step " +
           std::to_string(forecast.step_index) + ", added sigma_y^2 to the diagonal");
      Cyy.diagonal().array() += s2 > 0.0 ? s2 : 1.0;
      ldlt.compute(Cyy);
    }
    // K Cyy = Cxy  <=>  Cyy K^T = Cxy^T (Cyy symmetric)
    const Matrix K = ldlt.solve(Cxy.transpose()).transpose();
    const Matrix A = X + K * innov;
    for (std::size_t n = 0; n < N; ++n) out.members[n] = A.col(static_cast<Index>(n));
    if (diag) diag->enkf = EnKFState{K, Cxy, Cyy};
  } else {
    // Cyy = Yc Yc^T / N has rank < N <= d_y, so it is always singular here. With the
    // sigma_y^2 floor, Woodbury gives
    //   (s2 I + Yc Yc^T / N)^{-1} = (I - Yc (N s2 I + Yc^T Yc)^{-1} Yc^T) / s2.
    warn("EnKF-PO: observation covariance is rank deficient (d_y >= N) at step " +
         std::to_string(forecast.step_index) + ", added sigma_y^2 to the diagonal");
    const double floor = s2 > 0.0 ? s2 : 1.0;
    Matrix small = Yc.transpose() * Yc;
    small.diagonal().array() += Nd * floor;
    const Eigen::LDLT<Matrix> ldlt(small);
    const Matrix YtR = Yc.transpose() * innov;
    const Matrix V = (innov - Yc * ldlt.solve(YtR)) / floor;  // Cyy^{-1} innov
    const Matrix A = X + Xc * (Yc.transpose() * V) / Nd;
    for (std::size_t n = 0; n < N; ++n) out.members[n] = A.col(static_cast<Index>(n));
  }
  for (std::size_t n = 0; n < N; ++n)
    if (!all_finite(out.members[n]))
      throw FilterDivergence(static_cast<long>(forecast.step_index), static_cast<long>(n), -1,
                             "EnKF-PO");
  return out;
}

Ensemble enkf_po_step(const Ensemble& prev, const TransitionModel& trans,
                      const ObservationModel& obs, const ObsVec& y, const RngSource& rng,
                      const Parallel& par, StepDiagnostics* diag) {
  return enkf_po_analysis(propagate(trans, prev, rng, par), obs, y, rng, diag);
}

}  // namespace enff
