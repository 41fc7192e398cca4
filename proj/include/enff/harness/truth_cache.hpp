/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <string>

#include "enff/dynamics/truth.hpp"

namespace enff::harness {

// Layout, all little-endian:
//   "ENFFDA01" | u64 version | u64 n_truth, dim, n_obs, obs_dim | u64 obs steps[n_obs]
//   | f64 truth[n_truth*dim] | f64 obs[n_obs*obs_dim] | f64 initial_condition[dim]
//   | u64 FNV-1a of all preceding bytes
constexpr std::uint64_t kTruthCacheVersion = 1;

void save_truth(const std::string& path, const TruthRun& run);
/// Throws IoError on a missing file, bad magic, version mismatch, truncation or
/// checksum failure.
TruthRun load_truth(const std::string& path);

std::string encode_truth(const TruthRun& run);
TruthRun decode_truth(const std::string& bytes, const std::string& origin = "<memory>");

}  // namespace enff::harness
