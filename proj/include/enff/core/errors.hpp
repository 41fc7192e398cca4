/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace enff {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or mismatched dimensions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Ill-conditioned or non-SPD matrices in the oracles.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class GridCoverageError : public Error {
 public:
  using Error::Error;
};

class TuningFailure : public Error {
 public:
  using Error::Error;
};

/// Non-finite state. Fields are -1 when not applicable.
class BlowupError : public Error {
 public:
  BlowupError(const std::string& what, long da_step, long member, long inner_step)
      : Error(what), da_step_(da_step), member_(member), inner_step_(inner_step) {}

  long da_step() const { return da_step_; }
  long member() const { return member_; }
  long inner_step() const { return inner_step_; }

 private:
  long da_step_;
  long member_;
  long inner_step_;
};

class PropagationBlowup : public BlowupError {
 public:
  PropagationBlowup(long da_step, long member)
      : BlowupError("propagation blowup at DA step " + std::to_string(da_step) + ", member " +
                        std::to_string(member),
                    da_step, member, -1) {}
};

class IntegrationBlowup : public BlowupError {
 public:
  explicit IntegrationBlowup(long inner_step)
      : BlowupError("integration blowup at Euler step " + std::to_string(inner_step), -1, -1,
                    inner_step) {}
};

class FilterDivergence : public BlowupError {
 public:
  FilterDivergence(long da_step, long member, long inner_step, const std::string& filter)
      : BlowupError(filter + " diverged at DA step " + std::to_string(da_step) + ", member " +
                        std::to_string(member) + ", inner step " + std::to_string(inner_step),
                    da_step, member, inner_step) {}
};

}  // namespace enff
