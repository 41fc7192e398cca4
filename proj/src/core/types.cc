/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/core/types.hpp"

#include <string>

#include "enff/core/errors.hpp"

namespace enff {

Ensemble::Ensemble(std::vector<StateVec> m, std::size_t step)
    : members(std::move(m)), step_index(step) {}

Index Ensemble::dim() const { return members.empty() ? 0 : members.front().size(); }

StateVec Ensemble::mean() const {
  if (members.empty()) throw ConfigError("mean of an empty ensemble");
  StateVec m = StateVec::Zero(dim());
  for (const auto& x : members) m += x;
  return m / static_cast<double>(members.size());
}

StateVec Ensemble::variance() const {
  const StateVec m = mean();
  StateVec v = StateVec::Zero(dim());
  for (const auto& x : members) v.array() += (x - m).array().square();
  return v / static_cast<double>(members.size());
}

Matrix Ensemble::as_matrix() const {
  Matrix X(dim(), static_cast<Index>(members.size()));
  for (std::size_t n = 0; n < members.size(); ++n) X.col(static_cast<Index>(n)) = members[n];
  return X;
}

void Ensemble::validate() const {
  if (members.empty()) throw ConfigError("ensemble has no members");
  const Index d = dim();
  if (d < 1) throw ConfigError("ensemble dimension must be at least 1");
  for (std::size_t n = 0; n < members.size(); ++n) {
    if (members[n].size() != d)
      throw ConfigError("member " + std::to_string(n) + " has dimension " +
                        std::to_string(members[n].size()) + ", expected " + std::to_string(d));
    if (!all_finite(members[n]))
      throw ConfigError("member " + std::to_string(n) + " is not finite");
  }
}

bool all_finite(const StateVec& x) { return x.allFinite(); }

}  // namespace enff
