/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "enff/harness/config.hpp"
#include "enff/harness/experiment.hpp"

namespace enff::harness {

struct TuneAxis {
  std::string name;
  std::vector<double> values;
};

/// Cartesian product of named axes. Axis names: sigma_min, lambda (EnFF) and
/// eps_alpha, eps_beta (EnSF).
struct TuneGrid {
  std::vector<TuneAxis> axes;

  std::size_t size() const;
  /// Points in row-major order, last axis fastest.
  std::vector<std::vector<double>> points() const;
  void validate() const;

  static TuneGrid enff_default();
  static TuneGrid ensf_default();
  /// The default grid for the filter, or an empty grid (one point) when it has no
  /// tunable parameters.
  static TuneGrid default_for(const FilterSpec& f);
};

TuneGrid parse_grid(const nlohmann::json& j);
TuneGrid load_grid(const std::string& path);

/// Copy of `f` with the named parameters replaced.
FilterSpec apply_params(const FilterSpec& f, const std::vector<std::string>& names,
                        const std::vector<double>& values);

struct TuneRow {
  int T = 0;
  std::vector<double> params;
  double summary_rmse = 0.0;
  bool diverged = false;
};

struct TuneResult {
  std::string filter;
  std::vector<std::string> names;
  std::vector<TuneRow> table;
  /// Best parameters per T; absent when every grid point diverged at that T.
  std::map<int, std::optional<std::vector<double>>> best;
};

/// Argmin of summary RMSE among the rows with the given T. Rows within 1e-12 of the
/// minimum are tied and resolved by the lexicographically smallest parameter tuple.
std::optional<std::size_t> select_best(const std::vector<TuneRow>& rows, int T);

/// Evaluates every grid point of cfg.filters[filter_index] at every T on the tuning
/// trajectory (cfg.tuning_seed). Throws TuningFailure listing the grid when every
/// point diverged for every T.
TuneResult tune(const ExperimentConfig& cfg, std::size_t filter_index, const TuneGrid& grid,
                TruthStore& truths);
TuneResult tune(const ExperimentConfig& cfg, std::size_t filter_index, const TuneGrid& grid);

}  // namespace enff::harness
