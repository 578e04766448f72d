#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mudsim/errors.hpp"
#include "mudsim/experiments.hpp"

namespace mudsim {

inline constexpr std::string_view kToolName = "mudsim";
inline constexpr std::string_view kToolVersion = "1.0.0";

// Every accepted config key. Unknown keys are rejected with this list so typos
// fail loudly instead of silently running the default scenario.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "exp_id", "detectors", "axis_values", "runs", "min_bits", "extended", "extended_min_bits",
      "extended_threshold_db", "base_seed", "workers", "degree", "poly1", "poly2", "num_users",
      "frame_length", "snr_db", "nearfar_db", "noise_psd", "doppler_rate",
      "fading_innovation_std", "fading_init_mean", "fading_init_std", "fading_init_min",
      "fading_init_max", "num_flowers", "max_iter", "p_change0", "gamma_d0", "gamma_a0",
      "levy_lambda", "levy_beta", "pc_step0", "entropy_low", "entropy_high", "warm_jitter_std",
      "symbol_metric", "ga_population", "ga_crossover_rate", "ga_mutation_std",
      "ga_tournament_size", "ga_elite_count", "ga_max_evaluations"};
  return keys;
}

namespace detail {

inline double num_at(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_number())
    throw ConfigError("config: key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline std::uint64_t uint_at(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer())
    throw ConfigError("config: key '" + key + "' must be a non-negative integer");
  const auto v = j.at(key).get<std::int64_t>();
  if (v < 0) throw ConfigError("config: key '" + key + "' must be >= 0");
  return static_cast<std::uint64_t>(v);
}

inline bool bool_at(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_boolean()) throw ConfigError("config: key '" + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

inline std::string str_at(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_string()) throw ConfigError("config: key '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace detail

// Build an ExperimentConfig from a JSON object. Unspecified keys keep the
// baseline defaults (U=10, N=31, runs=50, 4 dB near-far, NumFl=25,
// MaxIter=2000, P_c=0.35, lambda=1.0).
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: document root must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const std::string& k : config_keys())
      if (k == item.key()) {
        known = true;
        break;
      }
    if (!known) {
      std::string msg = "config: unknown key '" + item.key() + "'; valid keys:";
      for (const std::string& k : config_keys()) msg += " " + k;
      throw ConfigError(msg);
    }
  }

  ExperimentConfig cfg;
  using detail::bool_at;
  using detail::num_at;
  using detail::str_at;
  using detail::uint_at;

  if (j.contains("exp_id")) cfg.exp_id = str_at(j, "exp_id");
  if (j.contains("detectors")) {
    if (!j.at("detectors").is_array())
      throw ConfigError("config: 'detectors' must be an array of detector names");
    cfg.detectors.clear();
    for (const auto& d : j.at("detectors")) {
      if (!d.is_string()) throw ConfigError("config: detector entries must be strings");
      cfg.detectors.push_back(detector_from_name(d.get<std::string>()));
    }
  }
  if (j.contains("axis_values")) {
    if (!j.at("axis_values").is_array())
      throw ConfigError("config: 'axis_values' must be an array of numbers");
    cfg.axis_values.clear();
    for (const auto& v : j.at("axis_values")) {
      if (!v.is_number()) throw ConfigError("config: axis values must be numbers");
      cfg.axis_values.push_back(v.get<double>());
    }
  }
  if (j.contains("runs")) cfg.runs = uint_at(j, "runs");
  if (j.contains("min_bits")) cfg.min_bits = uint_at(j, "min_bits");
  if (j.contains("extended")) cfg.extended = bool_at(j, "extended");
  if (j.contains("extended_min_bits")) cfg.extended_min_bits = uint_at(j, "extended_min_bits");
  if (j.contains("extended_threshold_db"))
    cfg.extended_threshold_db = num_at(j, "extended_threshold_db");
  if (j.contains("base_seed")) cfg.base_seed = uint_at(j, "base_seed");
  if (j.contains("workers")) cfg.workers = uint_at(j, "workers");

  if (j.contains("degree")) cfg.degree = static_cast<unsigned>(uint_at(j, "degree"));
  if (j.contains("poly1")) cfg.poly1 = static_cast<std::uint32_t>(uint_at(j, "poly1"));
  if (j.contains("poly2")) cfg.poly2 = static_cast<std::uint32_t>(uint_at(j, "poly2"));
  if (j.contains("num_users")) cfg.num_users = uint_at(j, "num_users");
  if (j.contains("frame_length")) cfg.frame_length = uint_at(j, "frame_length");
  if (j.contains("snr_db")) cfg.snr_db = num_at(j, "snr_db");
  if (j.contains("nearfar_db")) cfg.nearfar_db = num_at(j, "nearfar_db");
  if (j.contains("noise_psd")) cfg.noise_psd = num_at(j, "noise_psd");
  if (j.contains("doppler_rate")) cfg.doppler_rate = num_at(j, "doppler_rate");
  if (j.contains("fading_innovation_std")) {
    if (!j.at("fading_innovation_std").is_null())
      cfg.fading_innovation_std = num_at(j, "fading_innovation_std");
  }
  if (j.contains("fading_init_mean")) cfg.fading_init_mean = num_at(j, "fading_init_mean");
  if (j.contains("fading_init_std")) cfg.fading_init_std = num_at(j, "fading_init_std");
  if (j.contains("fading_init_min")) cfg.fading_init_min = num_at(j, "fading_init_min");
  if (j.contains("fading_init_max")) cfg.fading_init_max = num_at(j, "fading_init_max");

  if (j.contains("num_flowers")) cfg.fpa.num_flowers = uint_at(j, "num_flowers");
  if (j.contains("max_iter")) cfg.fpa.max_iter = uint_at(j, "max_iter");
  if (j.contains("p_change0")) cfg.fpa.p_change0 = num_at(j, "p_change0");
  if (j.contains("gamma_d0")) cfg.fpa.gamma_d0 = num_at(j, "gamma_d0");
  if (j.contains("gamma_a0")) cfg.fpa.gamma_a0 = num_at(j, "gamma_a0");
  if (j.contains("levy_lambda")) cfg.fpa.levy_lambda = num_at(j, "levy_lambda");
  if (j.contains("levy_beta")) cfg.fpa.levy_beta = num_at(j, "levy_beta");
  if (j.contains("pc_step0")) cfg.fpa.pc_step0 = num_at(j, "pc_step0");
  if (j.contains("entropy_low")) cfg.fpa.entropy_low = num_at(j, "entropy_low");
  if (j.contains("entropy_high")) cfg.fpa.entropy_high = num_at(j, "entropy_high");
  if (j.contains("warm_jitter_std")) {
    cfg.fpa.warm_jitter_std = num_at(j, "warm_jitter_std");
    cfg.ga.warm_jitter_std = cfg.fpa.warm_jitter_std;
  }
  if (j.contains("symbol_metric")) {
    const std::string metric = str_at(j, "symbol_metric");
    if (metric == "continuous")
      cfg.fpa.symbol_metric = SymbolMetric::kContinuous;
    else if (metric == "sign")
      cfg.fpa.symbol_metric = SymbolMetric::kSign;
    else
      throw ConfigError("config: symbol_metric must be 'continuous' or 'sign'");
    cfg.ga.symbol_metric = cfg.fpa.symbol_metric;
  }

  if (j.contains("ga_population")) cfg.ga.population = uint_at(j, "ga_population");
  if (j.contains("ga_crossover_rate")) cfg.ga.crossover_rate = num_at(j, "ga_crossover_rate");
  if (j.contains("ga_mutation_std")) cfg.ga.mutation_std = num_at(j, "ga_mutation_std");
  if (j.contains("ga_tournament_size")) cfg.ga.tournament_size = uint_at(j, "ga_tournament_size");
  if (j.contains("ga_elite_count")) cfg.ga.elite_count = uint_at(j, "ga_elite_count");
  if (j.contains("ga_max_evaluations")) {
    cfg.ga.max_evaluations = uint_at(j, "ga_max_evaluations");
    cfg.ga_budget_explicit = true;
  }

  // Fail fast on invariant violations (ranges, family size, band shapes).
  validate(cfg.fpa);
  validate(cfg.ga);
  const Codebook cb = make_codebook(cfg);
  if (cfg.num_users == 0 || cfg.num_users > cb.family_size())
    throw ConfigError("config: num_users must lie in [1, " + std::to_string(cb.family_size()) +
                      "] for degree " + std::to_string(cfg.degree));
  if (cfg.frame_length == 0) throw ConfigError("config: frame_length must be >= 1");
  if (cfg.runs == 0) throw ConfigError("config: runs must be >= 1");
  if (cfg.noise_psd < 0) throw ConfigError("config: noise_psd must be >= 0");
  if (cfg.doppler_rate < 0) throw ConfigError("config: doppler_rate must be >= 0");
  return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["exp_id"] = cfg.exp_id;
  std::vector<std::string> det_names;
  for (DetectorKind k : cfg.detectors) det_names.push_back(detector_name(k));
  j["detectors"] = det_names;
  j["axis_values"] = cfg.axis_values;
  j["runs"] = cfg.runs;
  j["min_bits"] = cfg.min_bits;
  j["extended"] = cfg.extended;
  j["extended_min_bits"] = cfg.extended_min_bits;
  j["extended_threshold_db"] = cfg.extended_threshold_db;
  j["base_seed"] = cfg.base_seed;
  j["workers"] = cfg.workers;
  j["degree"] = cfg.degree;
  if (cfg.poly1) j["poly1"] = *cfg.poly1;
  if (cfg.poly2) j["poly2"] = *cfg.poly2;
  j["num_users"] = cfg.num_users;
  j["frame_length"] = cfg.frame_length;
  j["snr_db"] = cfg.snr_db;
  j["nearfar_db"] = cfg.nearfar_db;
  j["noise_psd"] = cfg.noise_psd;
  j["doppler_rate"] = cfg.doppler_rate;
  if (cfg.fading_innovation_std) j["fading_innovation_std"] = *cfg.fading_innovation_std;
  j["fading_init_mean"] = cfg.fading_init_mean;
  j["fading_init_std"] = cfg.fading_init_std;
  j["fading_init_min"] = cfg.fading_init_min;
  j["fading_init_max"] = cfg.fading_init_max;
  j["num_flowers"] = cfg.fpa.num_flowers;
  j["max_iter"] = cfg.fpa.max_iter;
  j["p_change0"] = cfg.fpa.p_change0;
  j["gamma_d0"] = cfg.fpa.gamma_d0;
  j["gamma_a0"] = cfg.fpa.gamma_a0;
  j["levy_lambda"] = cfg.fpa.levy_lambda;
  j["levy_beta"] = cfg.fpa.levy_beta;
  j["pc_step0"] = cfg.fpa.pc_step0;
  j["entropy_low"] = cfg.fpa.entropy_low;
  j["entropy_high"] = cfg.fpa.entropy_high;
  j["warm_jitter_std"] = cfg.fpa.warm_jitter_std;
  j["symbol_metric"] = cfg.fpa.symbol_metric == SymbolMetric::kSign ? "sign" : "continuous";
  j["ga_population"] = cfg.ga.population;
  j["ga_crossover_rate"] = cfg.ga.crossover_rate;
  j["ga_mutation_std"] = cfg.ga.mutation_std;
  j["ga_tournament_size"] = cfg.ga.tournament_size;
  j["ga_elite_count"] = cfg.ga.elite_count;
  if (cfg.ga_budget_explicit) j["ga_max_evaluations"] = cfg.ga.max_evaluations;
  return j;
}

// Environment overrides: MUDSIM_<KEY> (upper-cased config key) replaces the
// file value. Values are parsed as JSON when possible, else taken as strings.
inline void apply_env_overrides(nlohmann::json& j, const char* prefix = "MUDSIM_") {
  for (const std::string& key : config_keys()) {
    std::string env_name = prefix;
    for (char c : key) env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const char* value = std::getenv(env_name.c_str());
    if (!value) continue;
    const nlohmann::json parsed = nlohmann::json::parse(value, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded())
      j[key] = std::string(value);
    else
      j[key] = parsed;
  }
}

// Load the raw config document (after env overrides). An empty path yields an
// empty object. Manifest files produced by this tool are accepted: their
// embedded resolved config is used, which is what makes a manifest re-runnable.
inline nlohmann::json load_config_json(const std::string& path, bool use_env = true) {
  nlohmann::json j = nlohmann::json::object();
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open '" + path + "'");
    try {
      f >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    if (j.is_object() && j.contains("manifest_version") && j.contains("config"))
      j = j.at("config");
  }
  if (use_env) apply_env_overrides(j);
  return j;
}

inline ExperimentConfig parse_config(const std::string& path, bool use_env = true) {
  return config_from_json(load_config_json(path, use_env));
}

inline std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Run provenance, written to <out>/manifest.json before simulation starts and
// finalized (finished_at) afterwards. Re-running with --config manifest.json
// reproduces the output CSVs byte for byte.
inline nlohmann::json make_manifest(const std::string& subcommand, const std::string& config_path,
                                    const ExperimentConfig& cfg, const std::string& out_dir) {
  nlohmann::json m;
  m["manifest_version"] = 1;
  m["tool"] = std::string(kToolName);
  m["tool_version"] = std::string(kToolVersion);
  m["subcommand"] = subcommand;
  m["config_path"] = config_path;
  m["base_seed"] = cfg.base_seed;
  m["out_dir"] = out_dir;
  m["started_at"] = iso8601_utc_now();
  m["finished_at"] = nullptr;
  m["config"] = config_to_json(cfg);
  return m;
}

}  // namespace mudsim
