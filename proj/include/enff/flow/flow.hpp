/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <functional>
#include <vector>

#include "enff/core/rng.hpp"
#include "enff/core/types.hpp"

namespace enff {

enum class FlowType { OT, F2P };

/// Affine conditional path z_t = alpha_t z1 + beta_t z0 + sigma_t eps.
///   OT : alpha = t, beta = 1 - (1 - sigma_min) t, sigma_t = 0, z0 ~ N(0, I)
///   F2P: alpha = t, beta = 1 - t,                sigma_t = sigma_min
struct FlowKind {
  FlowType type = FlowType::OT;
  double sigma_min = 1e-3;

  static FlowKind ot(double sigma_min);
  static FlowKind f2p(double sigma_min);

  double alpha(double t) const { return t; }
  double beta(double t) const;
  double sigma(double t) const;

  /// Mean coefficients and std of the Gaussian p_t(z | z0, z1).
  double mean_ref_coeff(double t) const { return type == FlowType::F2P ? 1.0 - t : 0.0; }
  double path_std(double t) const;

  void validate() const;
};

class PathTime {
 public:
  explicit PathTime(double t);
  double value() const { return t_; }

 private:
  double t_;
};

/// N (reference, target) pairs stored row-wise (N x d). Pair n couples refs row n with
/// targets row n.
class CoupledPairSet {
 public:
  CoupledPairSet(FlowKind kind, const std::vector<StateVec>& refs,
                 const std::vector<StateVec>& targets);
  CoupledPairSet(FlowKind kind, Matrix refs, Matrix targets);

  const FlowKind& kind() const { return kind_; }
  Index size() const { return Z1_.rows(); }
  Index dim() const { return Z1_.cols(); }

  const Matrix& refs() const { return Z0_; }
  const Matrix& targets() const { return Z1_; }
  StateVec ref(Index n) const { return Z0_.row(n).transpose(); }
  StateVec target(Index n) const { return Z1_.row(n).transpose(); }

 private:
  FlowKind kind_;
  Matrix Z0_;
  Matrix Z1_;
};

/// Posterior pair weights at (z, t) and the weighted means of targets and refs.
/// Keeps scratch buffers, so use one instance per thread.
class MixtureEvaluator {
 public:
  /// `log_tilt`, if given, is added to every pair's log-weight (length N) and must
  /// outlive the evaluator.
  explicit MixtureEvaluator(const CoupledPairSet& pairs, const Eigen::ArrayXd* log_tilt = nullptr);

  void evaluate(const StateVec& z, double t);

  const Eigen::ArrayXd& weights() const { return w_; }
  const StateVec& mean_target() const { return zhat1_; }
  const StateVec& mean_ref() const { return zhat0_; }

  /// sum_n w_n cond_vf(n) for the last evaluate(); linear in the pair so it only
  /// needs the weighted means.
  StateVec velocity(const StateVec& z, double t) const;

 private:
  const CoupledPairSet& pairs_;
  const Eigen::ArrayXd* tilt_;
  Eigen::ArrayXd d2_;
  Eigen::ArrayXd w_;
  StateVec zhat1_;
  StateVec zhat0_;
};

StateVec cond_vf(const FlowKind& kind, const StateVec& z, const StateVec& z0, const StateVec& z1,
                 PathTime t);
double cond_log_density(const FlowKind& kind, const StateVec& z, const StateVec& z0,
                        const StateVec& z1, PathTime t);
StateVec sample_initial(const FlowKind& kind, const StateVec& z0, RngStream& rng);

Eigen::ArrayXd pair_weights(const CoupledPairSet& pairs, const StateVec& z, PathTime t);
StateVec marginal_vf(const CoupledPairSet& pairs, const StateVec& z, PathTime t);

using VectorField = std::function<StateVec(const StateVec& z, double t)>;

struct FlowResult {
  StateVec endpoint;
  std::vector<StateVec> trajectory;
};

/// Forward Euler on the uniform grid t_k = k / T. The trajectory holds T + 1 points
/// unless `keep_trajectory` is false.
FlowResult integrate_flow(const VectorField& field, const StateVec& z_init, int T,
                          bool keep_trajectory = true);

}  // namespace enff
