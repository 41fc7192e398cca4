/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <random>

#include "enff/core/types.hpp"

namespace enff {

enum class Purpose : std::uint64_t {
  ModelNoise = 1,
  ObsNoise = 2,
  Reference = 3,
  FlowInit = 4,
  SdeNoise = 5,
  Resample = 6,
  PerturbedObs = 7,
  EnsembleInit = 8,
  TruthInit = 9,
  TruthObs = 10,
  TruthModelNoise = 11,
  Test = 99,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Draws for one (seed, step, member, purpose) key. Two streams with the same key
/// produce the same sequence no matter which thread constructs them or when.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t step, std::uint64_t member, Purpose purpose);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  StateVec normal_vector(Index d);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// A seed from which keyed streams are derived.
class RngSource {
 public:
  explicit RngSource(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  RngStream stream(std::uint64_t step, std::uint64_t member, Purpose purpose) const {
    return RngStream(seed_, step, member, purpose);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace enff
