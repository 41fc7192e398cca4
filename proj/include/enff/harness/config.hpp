/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "enff/core/observation.hpp"
#include "enff/dynamics/truth.hpp"
#include "enff/filters/filters.hpp"

namespace enff::harness {

constexpr int kSchemaVersion = 1;

/// One filter of an experiment. `free_run` means no assimilation at all (the
/// ensemble is only propagated); `filter` is then unused.
struct FilterSpec {
  std::string name;
  FilterConfig filter;
  bool free_run = false;

  bool uses_T() const;
  std::string flow_label() const;
  std::string guidance_label() const;
};

struct ExperimentConfig {
  SystemConfig system = Lorenz96Config{};
  std::string observation = "arctan";
  Protocol protocol;
  std::vector<FilterSpec> filters;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::uint64_t tuning_seed = 1000;
  std::vector<int> T_values{5, 10, 20, 50, 100};
  std::size_t ensemble_size = 20;
  std::string output_dir = "out";
  int workers = 1;
  /// Off by default: timings are the only non-reproducible CSV column.
  bool record_wall_time = false;

  ObservationModel observation_model() const;
  void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON of everything that influences results (not output_dir, workers
/// or timing), so equal hashes mean equal numbers.
nlohmann::json canonical_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);
/// Same, restricted to what determines the truth and observations.
std::string truth_hash(const ExperimentConfig& cfg);

nlohmann::json system_to_json(const SystemConfig& sys);
nlohmann::json filter_to_json(const FilterSpec& f);
FilterSpec parse_filter(const std::string& name, const nlohmann::json& params);

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace enff::harness
