/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace enff {

using Index = Eigen::Index;
using StateVec = Eigen::VectorXd;
using ObsVec = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// N members of dimension d at DA step `step_index`. Member order is part of the
/// contract: F2P couples member n of one step with member n of the next.
struct Ensemble {
  std::vector<StateVec> members;
  std::size_t step_index = 0;

  Ensemble() = default;
  Ensemble(std::vector<StateVec> m, std::size_t step);

  std::size_t size() const { return members.size(); }
  Index dim() const;

  StateVec mean() const;
  /// Per-coordinate variance with 1/N normalisation.
  StateVec variance() const;
  /// d x N, one column per member.
  Matrix as_matrix() const;

  /// Throws ConfigError when empty, ragged, or non-finite.
  void validate() const;
};

bool all_finite(const StateVec& x);

}  // namespace enff
