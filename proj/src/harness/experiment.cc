/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/harness/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include "enff/core/errors.hpp"
#include "enff/filters/filters.hpp"
#include "enff/harness/systems.hpp"
#include "enff/harness/truth_cache.hpp"

namespace enff::harness {

std::string RunRecord::series_label() const {
  std::string s = filter;
  if (flow != "-") s += "-" + flow;
  if (guidance != "-") s += "-" + guidance;
  return s;
}

double rmse(const Ensemble& ens, const StateVec& truth) {
  if (ens.dim() != truth.size()) throw ConfigError("rmse: ensemble and truth dimensions differ");
  return std::sqrt((ens.mean() - truth).squaredNorm() / static_cast<double>(truth.size()));
}

double summary_rmse(const std::vector<double>& series, bool diverged, std::size_t window) {
  if (diverged || series.empty()) return std::numeric_limits<double>::infinity();
  const std::size_t k = std::min(window, series.size());
  double s = 0.0;
  for (std::size_t i = series.size() - k; i < series.size(); ++i) s += series[i];
  return s / static_cast<double>(k);
}

// -----------------------------------------------------------------------------

TruthStore::TruthStore(const ExperimentConfig& cfg, std::optional<std::string> cache_dir)
    : cfg_(cfg), cache_dir_(std::move(cache_dir)) {}

std::string TruthStore::cache_path(std::uint64_t seed) const {
  if (!cache_dir_) return {};
  return (std::filesystem::path(*cache_dir_) /
          (system_name(cfg_.system) + "_" + truth_hash(cfg_) + "_seed" + std::to_string(seed) + ".bin"))
      .string();
}

std::shared_ptr<const TruthRun> TruthStore::get(std::uint64_t seed) {
  std::shared_ptr<Slot> slot;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& s = slots_[seed];
    if (!s) s = std::make_shared<Slot>();
    slot = s;
  }
  std::call_once(slot->once, [&] {
    const std::string path = cache_path(seed);
    if (!path.empty() && std::filesystem::exists(path)) {
      try {
        slot->run = std::make_shared<const TruthRun>(load_truth(path));
        return;
      } catch (const IoError&) {
        // Unreadable cache: regenerate and overwrite below.
      }
    }
    auto run = std::make_shared<const TruthRun>(
        make_truth_and_obs(cfg_.system, cfg_.observation_model(), cfg_.protocol, RngSource(seed)));
    if (!path.empty()) save_truth(path, *run);
    slot->run = std::move(run);
  });
  return slot->run;
}

// -----------------------------------------------------------------------------

void filter_params(const FilterSpec& f, std::string& n1, double& v1, std::string& n2, double& v2) {
  n1.clear();
  n2.clear();
  v1 = v2 = 0.0;
  if (f.free_run) return;
  if (const auto* e = std::get_if<EnFFParams>(&f.filter.algorithm)) {
    n1 = "sigma_min";
    v1 = e->flow.sigma_min;
    if (e->guidance.type == GuidanceType::Localized) {
      n2 = "lambda";
      v2 = e->guidance.lambda;
    }
  } else if (const auto* s = std::get_if<EnSFParams>(&f.filter.algorithm)) {
    n1 = "eps_alpha";
    v1 = s->eps_alpha;
    n2 = "eps_beta";
    v2 = s->eps_beta;
  }
}

RunRecord run_single(const ExperimentConfig& cfg, const FilterSpec& filter, int T,
                     std::uint64_t seed, const TruthRun& truth) {
  RunRecord rec;
  rec.system = system_name(cfg.system);
  rec.filter = filter.name;
  rec.flow = filter.flow_label();
  rec.guidance = filter.guidance_label();
  rec.T = filter.uses_T() ? T : 0;
  rec.N = cfg.ensemble_size;
  rec.seed = seed;
  rec.config_hash = config_hash(cfg);
  filter_params(filter, rec.param1_name, rec.param1, rec.param2_name, rec.param2);

  FilterConfig fc = filter.filter;
  fc.N = cfg.ensemble_size;
  if (filter.uses_T()) fc.T = T;

  const RngSource rng(seed);
  const ObservationModel obs = cfg.observation_model();
  const TransitionModel trans = experiment_transition(cfg);
  const Ensemble init = initial_ensemble(cfg, truth.initial_condition, cfg.ensemble_size, rng);
  const std::size_t J = truth.observations.size();

  auto record = [&](const Ensemble& e) {
    const double r = rmse(e, truth.truth.at(e.step_index));
    if (!std::isfinite(r)) throw BlowupError("non-finite ensemble mean", static_cast<long>(e.step_index), -1, -1);
    rec.rmse_series.push_back(r);
  };

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (filter.free_run) {
      Ensemble e = init;
      for (std::size_t j = 1; j <= J; ++j) {
        e = propagate(trans, e, rng);
        record(e);
      }
    } else {
      run_filter(fc, init, trans, obs, truth.observations, J, rng,
                 [&](const Ensemble& e, const StepDiagnostics&) { record(e); });
    }
  } catch (const BlowupError& e) {
    rec.diverged = true;
    rec.message = e.what();
  } catch (const NumericalError& e) {
    rec.diverged = true;
    rec.message = e.what();
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double steps = static_cast<double>(std::max<std::size_t>(1, rec.rmse_series.size()));
  rec.wall_ms_per_step =
      cfg.record_wall_time ? std::chrono::duration<double, std::milli>(t1 - t0).count() / steps : 0.0;
  rec.summary_rmse = summary_rmse(rec.rmse_series, rec.diverged);
  return rec;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, TruthStore& truths) {
  cfg.validate();
  struct Job {
    std::size_t filter;
    std::uint64_t seed;
    int T;
  };
  std::vector<Job> jobs;
  for (std::size_t f = 0; f < cfg.filters.size(); ++f)
    for (std::uint64_t seed : cfg.seeds) {
      if (cfg.filters[f].uses_T())
        for (int T : cfg.T_values) jobs.push_back({f, seed, T});
      else
        jobs.push_back({f, seed, 0});
    }

  std::vector<RunRecord> out(jobs.size());
  Parallel(cfg.workers).for_each(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    const auto truth = truths.get(job.seed);
    out[i] = run_single(cfg, cfg.filters[job.filter], job.T, job.seed, *truth);
  });
  return out;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  TruthStore store(cfg, (std::filesystem::path(cfg.output_dir) / "truth").string());
  return run_experiment(cfg, store);
}

}  // namespace enff::harness
