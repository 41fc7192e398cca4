/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "enff/core/types.hpp"
#include "enff/dynamics/truth.hpp"
#include "enff/harness/config.hpp"

namespace enff::harness {

struct RunRecord {
  std::string system;
  std::string filter;
  std::string flow = "-";
  std::string guidance = "-";
  /// 0 for filters without an inner integrator.
  int T = 0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::string param1_name;
  double param1 = 0.0;
  std::string param2_name;
  double param2 = 0.0;
  /// One entry per completed DA step; shorter than the run on divergence.
  std::vector<double> rmse_series;
  double summary_rmse = 0.0;
  bool diverged = false;
  double wall_ms_per_step = 0.0;
  std::string config_hash;
  std::string message;

  /// Label used to group records into plot series.
  std::string series_label() const;
};

/// sqrt(mean_i (mean(ens)_i - truth_i)^2).
double rmse(const Ensemble& ens, const StateVec& truth);

/// Mean of the last min(window, size) entries; +inf when diverged or empty.
double summary_rmse(const std::vector<double>& series, bool diverged, std::size_t window = 50);

/// Truth/observation runs per seed, generated once and optionally cached on disk
/// under `cache_dir`. Safe to share between jobs.
class TruthStore {
 public:
  TruthStore(const ExperimentConfig& cfg, std::optional<std::string> cache_dir);

  std::shared_ptr<const TruthRun> get(std::uint64_t seed);
  std::string cache_path(std::uint64_t seed) const;

 private:
  struct Slot {
    std::once_flag once;
    std::shared_ptr<const TruthRun> run;
  };

  ExperimentConfig cfg_;
  std::optional<std::string> cache_dir_;
  std::mutex mutex_;
  std::map<std::uint64_t, std::shared_ptr<Slot>> slots_;
};

/// Parameter columns of a filter: (sigma_min, lambda) for EnFF, (eps_alpha, eps_beta)
/// for EnSF, empty names otherwise.
void filter_params(const FilterSpec& f, std::string& n1, double& v1, std::string& n2, double& v2);

/// One filter at one T against one seed's truth. Divergence is recorded, not thrown.
RunRecord run_single(const ExperimentConfig& cfg, const FilterSpec& filter, int T,
                     std::uint64_t seed, const TruthRun& truth);

/// Every (filter, seed, T) combination, ordered by filter, then seed, then T. Jobs run
/// on cfg.workers threads; the result does not depend on the worker count.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, TruthStore& truths);
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

}  // namespace enff::harness
