/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/harness/tune.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "enff/core/errors.hpp"

namespace enff::harness {

using nlohmann::json;

std::size_t TuneGrid::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

std::vector<std::vector<double>> TuneGrid::points() const {
  std::vector<std::vector<double>> out;
  const std::size_t total = size();
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::vector<double> p(axes.size());
    std::size_t r = flat;
    for (std::size_t a = axes.size(); a-- > 0;) {
      p[a] = axes[a].values[r % axes[a].values.size()];
      r /= axes[a].values.size();
    }
    out.push_back(std::move(p));
  }
  return out;
}

void TuneGrid::validate() const {
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a].values.empty()) throw ConfigError("grid axis '" + axes[a].name + "' has no values");
    for (std::size_t b = 0; b < a; ++b)
      if (axes[a].name == axes[b].name) throw ConfigError("grid axis '" + axes[a].name + "' repeated");
    for (double v : axes[a].values)
      if (!std::isfinite(v)) throw ConfigError("grid axis '" + axes[a].name + "' has a non-finite value");
  }
}

namespace {

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TuneGrid TuneGrid::enff_default() {
  std::vector<double> lambda{0.001, 0.005, 0.05};
  for (int i = 1; i <= 10; ++i) lambda.push_back(0.1 * i);
  return {{{"sigma_min", {1e-5, 1e-4, 1e-3, 1e-2, 1e-1}}, {"lambda", sorted(lambda)}}};
}

TuneGrid TuneGrid::ensf_default() {
  std::vector<double> alpha, beta{0.001, 0.005};
  for (int i = 1; i <= 10; ++i) alpha.push_back(0.1 * i);
  for (int i = 0; i <= 5; ++i) beta.push_back(0.025 + 0.05 * i);
  return {{{"eps_alpha", alpha}, {"eps_beta", sorted(beta)}}};
}

TuneGrid TuneGrid::default_for(const FilterSpec& f) {
  if (const auto* e = std::get_if<EnFFParams>(&f.filter.algorithm); e && !f.free_run) {
    TuneGrid g = enff_default();
    if (e->guidance.type == GuidanceType::MC) g.axes.pop_back();
    return g;
  }
  if (std::holds_alternative<EnSFParams>(f.filter.algorithm) && !f.free_run) return ensf_default();
  return {};
}

TuneGrid parse_grid(const json& j) {
  if (!j.is_object() || !j.contains("axes") || !j.at("axes").is_array())
    throw ConfigError("grid must be an object with an 'axes' array");
  TuneGrid g;
  for (const auto& a : j.at("axes")) {
    if (!a.is_object() || !a.contains("name") || !a.contains("values"))
      throw ConfigError("each grid axis needs 'name' and 'values'");
    try {
      g.axes.push_back({a.at("name").get<std::string>(), a.at("values").get<std::vector<double>>()});
    } catch (const json::exception& e) {
      throw ConfigError(std::string("invalid grid axis: ") + e.what());
    }
  }
  g.validate();
  return g;
}

TuneGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("grid file " + path + " is not valid JSON: " + e.what());
  }
  return parse_grid(j);
}

FilterSpec apply_params(const FilterSpec& f, const std::vector<std::string>& names,
                        const std::vector<double>& values) {
  FilterSpec out = f;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string& n = names[i];
    const double v = values.at(i);
    bool ok = false;
    if (auto* e = std::get_if<EnFFParams>(&out.filter.algorithm)) {
      if (n == "sigma_min") {
        e->flow.sigma_min = v;
        ok = true;
      } else if (n == "lambda" && e->guidance.type == GuidanceType::Localized) {
        e->guidance.lambda = v;
        ok = true;
      }
    } else if (auto* s = std::get_if<EnSFParams>(&out.filter.algorithm)) {
      if (n == "eps_alpha") {
        s->eps_alpha = v;
        ok = true;
      } else if (n == "eps_beta") {
        s->eps_beta = v;
        ok = true;
      }
    }
    if (!ok || out.free_run) throw ConfigError("parameter '" + n + "' does not apply to filter " + f.name);
  }
  return out;
}

std::optional<std::size_t> select_best(const std::vector<TuneRow>& rows, int T) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    if (r.T == T && !r.diverged && std::isfinite(r.summary_rmse)) lo = std::min(lo, r.summary_rmse);
  if (!std::isfinite(lo)) return std::nullopt;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.T != T || r.diverged || !(r.summary_rmse <= lo + 1e-12)) continue;
    if (!best || r.params < rows[*best].params) best = i;
  }
  return best;
}

TuneResult tune(const ExperimentConfig& cfg, std::size_t filter_index, const TuneGrid& grid,
                TruthStore& truths) {
  cfg.validate();
  grid.validate();
  if (filter_index >= cfg.filters.size()) throw ConfigError("filter index out of range");
  const FilterSpec& base = cfg.filters[filter_index];

  TuneResult res;
  res.filter = base.name;
  for (const auto& a : grid.axes) res.names.push_back(a.name);
  const auto points = grid.points();
  // Validate every point before spending compute on any.
  std::vector<FilterSpec> specs;
  for (const auto& p : points) {
    specs.push_back(apply_params(base, res.names, p));
    FilterConfig fc = specs.back().filter;
    fc.N = cfg.ensemble_size;
    if (!specs.back().free_run) fc.validate();
  }

  const std::vector<int> Ts = base.uses_T() ? cfg.T_values : std::vector<int>{0};
  res.table.resize(Ts.size() * points.size());
  const auto truth = truths.get(cfg.tuning_seed);
  Parallel(cfg.workers).for_each(res.table.size(), [&](std::size_t i) {
    const std::size_t t = i / points.size(), p = i % points.size();
    const RunRecord rec = run_single(cfg, specs[p], Ts[t], cfg.tuning_seed, *truth);
    res.table[i] = {Ts[t], points[p], rec.summary_rmse, rec.diverged};
  });

  bool any = false;
  for (int T : Ts) {
    const auto b = select_best(res.table, T);
    res.best[T] = b ? std::optional<std::vector<double>>(res.table[*b].params) : std::nullopt;
    any = any || b.has_value();
  }
  if (!any) {
    std::ostringstream msg;
    msg << "every grid point diverged for filter " << base.name << ";";
    for (const auto& a : grid.axes) {
      msg << " " << a.name << " in {";
      for (std::size_t k = 0; k < a.values.size(); ++k) msg << (k ? ", " : "") << a.values[k];
      msg << "}";
    }
    msg << " at T in {";
    for (std::size_t k = 0; k < Ts.size(); ++k) msg << (k ? ", " : "") << Ts[k];
    msg << "}";
    throw TuningFailure(msg.str());
  }
  return res;
}

TuneResult tune(const ExperimentConfig& cfg, std::size_t filter_index, const TuneGrid& grid) {
  TruthStore store(cfg, (std::filesystem::path(cfg.output_dir) / "truth").string());
  return tune(cfg, filter_index, grid, store);
}

}  // namespace enff::harness
