/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

// da: command line driver for twin experiments.
//   da run   --config <file> [--out <dir>] [--workers <n>]
//   da tune  --config <file> --grid <file|default> [--out <dir>] [--workers <n>]
//   da truth --config <file> [--out <dir>]
//   da plot  --in <csv> --out <svg> [--title <text>]
// Exit codes: 0 success, 1 I/O or runtime error, 2 configuration error,
// 3 every run diverged or tuning failed.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "enff/core/errors.hpp"
#include "enff/harness/config.hpp"
#include "enff/harness/experiment.hpp"
#include "enff/harness/report.hpp"
#include "enff/harness/tune.hpp"

namespace fs = std::filesystem;
using namespace enff;
using namespace enff::harness;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

ExperimentConfig load(const std::string& path, const std::string& out, int workers) {
  ExperimentConfig cfg = load_config(path);
  if (!out.empty()) cfg.output_dir = out;
  if (workers > 0) cfg.workers = workers;
  return cfg;
}

TruthStore make_store(const ExperimentConfig& cfg) {
  return TruthStore(cfg, (fs::path(cfg.output_dir) / "truth").string());
}

int cmd_run(const ExperimentConfig& cfg) {
  TruthStore store = make_store(cfg);
  const auto records = run_experiment(cfg, store);
  const fs::path dir(cfg.output_dir);
  write_csv((dir / "results.csv").string(), records);
  write_series_csv((dir / "series.csv").string(), records);
  write_text((dir / "config.json").string(), canonical_json(cfg).dump(2) + "\n");
  write_svg((dir / "rmse_vs_T.svg").string(), records,
            PlotOptions{system_name(cfg.system) + " summary RMSE", 760, 480});

  std::size_t diverged = 0;
  for (const auto& r : records) {
    std::cout << r.series_label() << " T=" << r.T << " seed=" << r.seed
              << " summary_rmse=" << format_double(r.summary_rmse);
    if (r.diverged) {
      ++diverged;
      std::cout << " DIVERGED (" << r.message << ")";
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << (dir / "results.csv").string() << "\n";
  return diverged == records.size() ? kExitDiverged : 0;
}

int cmd_tune(const ExperimentConfig& cfg, const std::string& grid_arg) {
  TruthStore store = make_store(cfg);
  const fs::path dir(cfg.output_dir);
  bool failed = false;
  for (std::size_t f = 0; f < cfg.filters.size(); ++f) {
    const FilterSpec& spec = cfg.filters[f];
    if (spec.free_run) continue;
    const TuneGrid grid = grid_arg == "default" ? TuneGrid::default_for(spec) : load_grid(grid_arg);
    const std::string stem = "tune_" + std::to_string(f) + "_" + spec.name +
                             (spec.flow_label() == "-" ? "" : "_" + spec.flow_label());
    try {
      const TuneResult res = tune(cfg, f, grid, store);
      write_text((dir / (stem + ".csv")).string(), tune_table_csv(res));
      const auto best = tune_best_json(res);
      write_text((dir / (stem + "_best.json")).string(), best.dump(2) + "\n");
      std::cout << stem << ": " << best["best"].dump() << "\n";
    } catch (const TuningFailure& e) {
      std::cerr << stem << ": " << e.what() << "\n";
      failed = true;
    }
  }
  return failed ? kExitDiverged : 0;
}

int cmd_truth(const ExperimentConfig& cfg) {
  TruthStore store = make_store(cfg);
  std::vector<std::uint64_t> seeds = cfg.seeds;
  if (std::find(seeds.begin(), seeds.end(), cfg.tuning_seed) == seeds.end()) seeds.push_back(cfg.tuning_seed);
  for (auto seed : seeds) {
    store.get(seed);
    std::cout << store.cache_path(seed) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble flow filter twin experiments"};
  app.require_subcommand(1);

  std::string config, out, grid, in, title = "Summary RMSE";
  int workers = 0;

  auto* run = app.add_subcommand("run", "Run every filter, seed and T of a config");
  run->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (overrides output_dir)");
  run->add_option("--workers", workers, "Worker threads (overrides workers)");

  auto* tun = app.add_subcommand("tune", "Grid search on the tuning trajectory");
  tun->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  tun->add_option("--grid", grid, "Grid JSON, or 'default' for the built-in grid")->required();
  tun->add_option("--out", out, "Output directory (overrides output_dir)");
  tun->add_option("--workers", workers, "Worker threads (overrides workers)");

  auto* tru = app.add_subcommand("truth", "Generate and cache truth runs");
  tru->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  tru->add_option("--out", out, "Output directory (overrides output_dir)");

  auto* plot = app.add_subcommand("plot", "Render a results CSV as SVG");
  plot->add_option("--in", in, "results CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", out, "SVG path")->required();
  plot->add_option("--title", title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*plot) {
      write_svg(out, read_csv(in), PlotOptions{title, 760, 480});
      return 0;
    }
    const ExperimentConfig cfg = load(config, out, workers);
    if (*run) return cmd_run(cfg);
    if (*tun) return cmd_tune(cfg, grid);
    return cmd_truth(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TuningFailure& e) {
    std::cerr << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
