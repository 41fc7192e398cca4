/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <optional>
#include <utility>

#include "enff/core/rng.hpp"
#include "enff/core/types.hpp"

namespace enff {

/// y = h(x) + sigma_y * eps with h either coordinatewise arctan or a linear map H.
/// Linear without an explicit matrix is the identity, which avoids storing d x d
/// matrices for the large systems.
class ObservationModel {
 public:
  enum class Kind { ArctanFull, Linear };

  static ObservationModel arctan(double sigma_y);
  static ObservationModel linear(Matrix H, double sigma_y);
  static ObservationModel identity(double sigma_y);

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  bool is_identity() const { return kind_ == Kind::Linear && !H_; }
  const std::optional<Matrix>& matrix() const { return H_; }

  Index obs_dim(Index state_dim) const;

  ObsVec apply(const StateVec& x) const;
  /// Dh(x)^T r.
  StateVec adjoint(const StateVec& x, const ObsVec& r) const;

  double energy(const StateVec& x, const ObsVec& y) const;
  StateVec grad_energy(const StateVec& x, const ObsVec& y) const;
  std::pair<double, StateVec> energy_and_grad(const StateVec& x, const ObsVec& y) const;

 private:
  ObservationModel(Kind kind, std::optional<Matrix> H, double sigma);
  void check_state(const StateVec& x) const;
  void check_obs(const StateVec& x, const ObsVec& y) const;

  Kind kind_;
  std::optional<Matrix> H_;
  double sigma_;
};

ObsVec observe(const ObservationModel& model, const StateVec& x, RngStream& rng);
std::pair<double, StateVec> energy_and_grad(const ObservationModel& model, const StateVec& x,
                                            const ObsVec& y);

}  // namespace enff
