/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/harness/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <numbers>

#include "enff/core/errors.hpp"

namespace enff::harness {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return item.key() == a; });
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid value for '") + key + "': " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  return get_or<T>(j, key, T{});
}

SystemConfig parse_system(const std::string& name, const json& p) {
  if (name == "lorenz96") {
    check_keys(p, {"d", "forcing", "dt"}, "system_params");
    Lorenz96Config c;
    c.d = get_or<Index>(p, "d", c.d);
    c.forcing = get_or<double>(p, "forcing", c.forcing);
    c.dt = get_or<double>(p, "dt", c.dt);
    return c;
  }
  if (name == "ks") {
    check_keys(p, {"preset", "n", "length", "length_over_pi", "dt"}, "system_params");
    const std::string preset = get_or<std::string>(p, "preset", "full");
    if (preset != "full" && preset != "desk") throw ConfigError("KS preset must be full or desk");
    KSConfig c = preset == "desk" ? KSConfig::desk() : KSConfig{};
    c.n = get_or<Index>(p, "n", c.n);
    c.length = get_or<double>(p, "length", c.length);
    if (p.contains("length_over_pi")) c.length = get_or<double>(p, "length_over_pi", 0.0) * std::numbers::pi;
    c.dt = get_or<double>(p, "dt", c.dt);
    return c;
  }
  if (name == "ns") {
    check_keys(p, {"n", "length", "nu", "dt", "forcing_amplitude", "forcing_mode", "gp_lengthscale"},
               "system_params");
    NSConfig c;
    c.n = get_or<int>(p, "n", c.n);
    c.length = get_or<double>(p, "length", c.length);
    c.nu = get_or<double>(p, "nu", c.nu);
    c.dt = get_or<double>(p, "dt", c.dt);
    c.forcing_amplitude = get_or<double>(p, "forcing_amplitude", c.forcing_amplitude);
    c.forcing_mode = get_or<int>(p, "forcing_mode", c.forcing_mode);
    c.gp_lengthscale = get_or<double>(p, "gp_lengthscale", c.gp_lengthscale);
    return c;
  }
  if (name == "linear") {
    check_keys(p, {"d", "a", "m0", "c0"}, "system_params");
    LinearGaussianConfig c;
    c.d = get_or<Index>(p, "d", c.d);
    c.a = get_or<double>(p, "a", c.a);
    c.m0 = get_or<double>(p, "m0", c.m0);
    c.c0 = get_or<double>(p, "c0", c.c0);
    return c;
  }
  throw ConfigError("unknown system '" + name + "' (expected lorenz96, ks, ns or linear)");
}

}  // namespace

// -----------------------------------------------------------------------------

bool FilterSpec::uses_T() const {
  if (free_run) return false;
  return std::holds_alternative<EnFFParams>(filter.algorithm) ||
         std::holds_alternative<EnSFParams>(filter.algorithm);
}

std::string FilterSpec::flow_label() const {
  if (const auto* p = std::get_if<EnFFParams>(&filter.algorithm))
    return p->flow.type == FlowType::OT ? "ot" : "f2p";
  return "-";
}

std::string FilterSpec::guidance_label() const {
  if (const auto* p = std::get_if<EnFFParams>(&filter.algorithm))
    return p->guidance.type == GuidanceType::MC ? "mc" : "localized";
  return "-";
}

FilterSpec parse_filter(const std::string& name, const json& params) {
  const json p = params.is_null() ? json::object() : params;
  FilterSpec f;
  f.name = name;
  if (name == "enff") {
    check_keys(p, {"flow", "guidance", "sigma_min", "lambda"}, "filter_params");
    const std::string flow = require<std::string>(p, "flow", "filter_params");
    const std::string guid = get_or<std::string>(p, "guidance", "localized");
    const double sigma = get_or<double>(p, "sigma_min", 1e-2);
    const double lambda = get_or<double>(p, "lambda", 0.5);
    EnFFParams e;
    if (flow == "ot")
      e.flow = FlowKind::ot(sigma);
    else if (flow == "f2p")
      e.flow = FlowKind::f2p(sigma);
    else
      throw ConfigError("flow must be ot or f2p");
    if (guid == "localized")
      e.guidance = GuidanceKind::localized(lambda);
    else if (guid == "mc")
      e.guidance = GuidanceKind::mc();
    else
      throw ConfigError("guidance must be localized or mc");
    f.filter.algorithm = e;
  } else if (name == "ensf") {
    check_keys(p, {"eps_alpha", "eps_beta"}, "filter_params");
    EnSFParams e;
    e.eps_alpha = get_or<double>(p, "eps_alpha", e.eps_alpha);
    e.eps_beta = get_or<double>(p, "eps_beta", e.eps_beta);
    f.filter.algorithm = e;
  } else if (name == "bpf") {
    check_keys(p, {}, "filter_params");
    f.filter.algorithm = BPFParams{};
  } else if (name == "enkf") {
    check_keys(p, {}, "filter_params");
    f.filter.algorithm = EnKFParams{};
  } else if (name == "none") {
    check_keys(p, {}, "filter_params");
    f.free_run = true;
  } else {
    throw ConfigError("unknown filter '" + name + "' (expected enff, ensf, bpf, enkf or none)");
  }
  return f;
}

ObservationModel ExperimentConfig::observation_model() const {
  if (observation == "arctan") return ObservationModel::arctan(protocol.obs_noise_std);
  if (observation == "identity") return ObservationModel::identity(protocol.obs_noise_std);
  throw ConfigError("observation must be arctan or identity");
}

void ExperimentConfig::validate() const {
  protocol.validate();
  (void)observation_model();
  std::visit([](const auto& s) { s.validate(); }, system);
  if (filters.empty()) throw ConfigError("no filter configured");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (ensemble_size < 1) throw ConfigError("ensemble_size must be positive");
  if (workers < 1) throw ConfigError("workers must be positive");
  const bool needs_T = std::any_of(filters.begin(), filters.end(), [](const FilterSpec& f) { return f.uses_T(); });
  if (needs_T && T_values.empty()) throw ConfigError("T_values must be non-empty for EnFF/EnSF");
  for (int T : T_values)
    if (T < 1) throw ConfigError("T values must be positive");
  for (const auto& f : filters) {
    if (f.free_run) continue;
    FilterConfig c = f.filter;
    c.N = ensemble_size;
    c.T = T_values.empty() ? 1 : T_values.front();
    c.validate();
  }
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, {"schema_version", "system", "system_params", "filter", "filter_params", "filters",
                 "protocol", "seeds", "tuning_seed", "T_values", "ensemble_size", "output_dir",
                 "workers", "record_wall_time"},
             "config");
  const int version = get_or<int>(j, "schema_version", kSchemaVersion);
  if (version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(version));

  ExperimentConfig c;
  const std::string sys = require<std::string>(j, "system", "config");
  c.system = parse_system(sys, j.value("system_params", json::object()));
  c.observation = sys == "linear" ? "identity" : "arctan";

  c.protocol = default_protocol(c.system);
  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    check_keys(p, {"total_steps", "burn_in", "observe_every", "obs_noise_std", "model_noise_std", "observation"},
               "protocol");
    c.protocol.total_steps = get_or<int>(p, "total_steps", c.protocol.total_steps);
    c.protocol.burn_in = get_or<int>(p, "burn_in", c.protocol.burn_in);
    c.protocol.observe_every = get_or<int>(p, "observe_every", c.protocol.observe_every);
    c.protocol.obs_noise_std = get_or<double>(p, "obs_noise_std", c.protocol.obs_noise_std);
    c.protocol.model_noise_std = get_or<double>(p, "model_noise_std", c.protocol.model_noise_std);
    c.observation = get_or<std::string>(p, "observation", c.observation);
  }
  // The DA interval is one observation period.
  std::visit(
      [&](auto& s) {
        if constexpr (requires { s.steps_per_da; }) s.steps_per_da = c.protocol.observe_every;
      },
      c.system);

  if (j.contains("filters")) {
    if (j.contains("filter")) throw ConfigError("use either 'filter' or 'filters', not both");
    if (!j.at("filters").is_array()) throw ConfigError("'filters' must be an array");
    for (const auto& f : j.at("filters")) {
      check_keys(f, {"filter", "filter_params"}, "filters entry");
      c.filters.push_back(parse_filter(require<std::string>(f, "filter", "filters entry"),
                                       f.value("filter_params", json::object())));
    }
  } else {
    c.filters.push_back(parse_filter(require<std::string>(j, "filter", "config"),
                                     j.value("filter_params", json::object())));
  }

  c.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", c.seeds);
  c.tuning_seed = get_or<std::uint64_t>(j, "tuning_seed", c.tuning_seed);
  c.T_values = get_or<std::vector<int>>(j, "T_values", c.T_values);
  c.ensemble_size = get_or<std::size_t>(j, "ensemble_size", c.ensemble_size);
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
  c.workers = get_or<int>(j, "workers", c.workers);
  c.record_wall_time = get_or<bool>(j, "record_wall_time", c.record_wall_time);
  for (auto& f : c.filters) f.filter.N = c.ensemble_size;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

// -----------------------------------------------------------------------------

json system_to_json(const SystemConfig& sys) {
  if (const auto* c = std::get_if<Lorenz96Config>(&sys))
    return {{"d", c->d}, {"forcing", c->forcing}, {"dt", c->dt}};
  if (const auto* c = std::get_if<KSConfig>(&sys))
    return {{"n", c->n}, {"length", c->length}, {"dt", c->dt}};
  if (const auto* c = std::get_if<NSConfig>(&sys))
    return {{"n", c->n},   {"length", c->length}, {"nu", c->nu}, {"dt", c->dt},
            {"forcing_amplitude", c->forcing_amplitude}, {"forcing_mode", c->forcing_mode},
            {"gp_lengthscale", c->gp_lengthscale}};
  const auto& c = std::get<LinearGaussianConfig>(sys);
  return {{"d", c.d}, {"a", c.a}, {"m0", c.m0}, {"c0", c.c0}};
}

json filter_to_json(const FilterSpec& f) {
  json p = json::object();
  if (const auto* e = std::get_if<EnFFParams>(&f.filter.algorithm)) {
    p["flow"] = f.flow_label();
    p["guidance"] = f.guidance_label();
    p["sigma_min"] = e->flow.sigma_min;
    if (e->guidance.type == GuidanceType::Localized) p["lambda"] = e->guidance.lambda;
  } else if (const auto* s = std::get_if<EnSFParams>(&f.filter.algorithm)) {
    p["eps_alpha"] = s->eps_alpha;
    p["eps_beta"] = s->eps_beta;
  }
  return {{"filter", f.name}, {"filter_params", p}};
}

namespace {

json protocol_json(const ExperimentConfig& c) {
  return {{"total_steps", c.protocol.total_steps},
          {"burn_in", c.protocol.burn_in},
          {"observe_every", c.protocol.observe_every},
          {"obs_noise_std", c.protocol.obs_noise_std},
          {"model_noise_std", c.protocol.model_noise_std},
          {"observation", c.observation}};
}

}  // namespace

json canonical_json(const ExperimentConfig& c) {
  json filters = json::array();
  for (const auto& f : c.filters) filters.push_back(filter_to_json(f));
  return {{"schema_version", kSchemaVersion},
          {"system", system_name(c.system)},
          {"system_params", system_to_json(c.system)},
          {"protocol", protocol_json(c)},
          {"filters", filters},
          {"seeds", c.seeds},
          {"tuning_seed", c.tuning_seed},
          {"T_values", c.T_values},
          {"ensemble_size", c.ensemble_size}};
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string s = canonical_json(c).dump();
  return hex64(fnv1a64(s.data(), s.size()));
}

std::string truth_hash(const ExperimentConfig& c) {
  const json j = {{"system", system_name(c.system)},
                  {"system_params", system_to_json(c.system)},
                  {"protocol", protocol_json(c)}};
  const std::string s = j.dump();
  return hex64(fnv1a64(s.data(), s.size()));
}

}  // namespace enff::harness
