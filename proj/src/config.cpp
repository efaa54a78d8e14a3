#include "radarhr/config.hpp"

#include <initializer_list>
#include <string>

#include "radarhr/errors.hpp"
#include "radarhr/io.hpp"

namespace radarhr {

namespace {

using nlohmann::json;

// Wraps one JSON object section: rejects unknown keys up front, then reads
// typed fields that are present.
class Section {
 public:
  Section(const json& j, std::string name, std::initializer_list<const char*> keys) : j_(j), name_(std::move(name)) {
    if (!j.is_object()) throw ConfigError(name_ + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) throw ConfigError("unknown key '" + key + "' in " + name_);
    }
  }

  void number(const char* key, double& out) const {
    if (!j_.contains(key)) return;
    if (!j_.at(key).is_number()) throw ConfigError(where(key) + " must be a number");
    out = j_.at(key).get<double>();
  }

  template <typename Int>
  void integer(const char* key, Int& out) const {
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + " must be an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned() || v.get<long long>() >= 0) {
        out = v.get<Int>();
        return;
      }
      throw ConfigError(where(key) + " must be non-negative");
    } else {
      out = v.get<Int>();
    }
  }

  template <typename T>
  void pair(const char* key, T& lo, T& hi) const {
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(where(key) + " must be a two-element numeric array");
    }
    if constexpr (std::is_integral_v<T>) {
      if (!v[0].is_number_integer() || !v[1].is_number_integer()) throw ConfigError(where(key) + " must hold integers");
    }
    lo = v[0].get<T>();
    hi = v[1].get<T>();
  }

  void string(const char* key, std::string& out) const {
    if (!j_.contains(key)) return;
    if (!j_.at(key).is_string()) throw ConfigError(where(key) + " must be a string");
    out = j_.at(key).get<std::string>();
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const { return j_.at(key); }

 private:
  std::string where(const char* key) const { return name_ + "." + key; }

  const json& j_;
  std::string name_;
};

OmegaInit parse_init(const std::string& s) {
  if (s == "uniform") return OmegaInit::Uniform;
  if (s == "zero") return OmegaInit::Zero;
  if (s == "random") return OmegaInit::Random;
  throw ConfigError("vmd_params.init_mode must be uniform | zero | random");
}

const char* init_name(OmegaInit m) {
  switch (m) {
    case OmegaInit::Uniform: return "uniform";
    case OmegaInit::Zero: return "zero";
    case OmegaInit::Random: return "random";
  }
  return "uniform";
}

VmdParams parse_vmd(const json& j) {
  const Section s(j, "vmd_params", {"k_modes", "alpha", "tau", "tolerance", "max_iterations", "init_mode", "init_seed"});
  VmdParams p = fixed_vmd_defaults();
  s.integer("k_modes", p.k_modes);
  s.number("alpha", p.alpha);
  s.number("tau", p.tau);
  s.number("tolerance", p.tolerance);
  s.integer("max_iterations", p.max_iterations);
  std::string init = init_name(p.init_mode);
  s.string("init_mode", init);
  p.init_mode = parse_init(init);
  s.integer("init_seed", p.init_seed);
  return p;
}

NrboConfig parse_nrbo(const json& j) {
  const Section s(j, "nrbo_config",
                  {"population_n", "max_iterations", "seed", "proximity_eps", "local_delta_range", "stall_limit", "workers"});
  NrboConfig c;
  s.integer("population_n", c.population_n);
  s.integer("max_iterations", c.max_iterations);
  s.integer("seed", c.seed);
  s.number("proximity_eps", c.proximity_eps);
  s.pair("local_delta_range", c.local_delta_range[0], c.local_delta_range[1]);
  s.integer("stall_limit", c.stall_limit);
  s.integer("workers", c.workers);
  return c;
}

GaConfig parse_ga(const json& j) {
  const Section s(j, "ga_config",
                  {"population_n", "generations", "crossover_rate", "mutation_rate", "tournament_size", "seed", "workers"});
  GaConfig c;
  s.integer("population_n", c.population_n);
  s.integer("generations", c.generations);
  s.number("crossover_rate", c.crossover_rate);
  s.number("mutation_rate", c.mutation_rate);
  s.integer("tournament_size", c.tournament_size);
  s.integer("seed", c.seed);
  s.integer("workers", c.workers);
  return c;
}

}  // namespace

void PipelineConfig::validate() const {
  radar_config.validate();
  if (!(decimate_to_hz > 0)) throw InvalidArgument("decimate_to_hz must be positive");
  vmd_params.validate();
  nrbo_config.validate();
  ga_config.validate();
  bounds.validate();
  sampen_config.validate();
  band_spec.validate();
  peak_config.validate();
}

PipelineConfig pipeline_config_from_json(const json& j) {
  const Section top(j, "config",
                    {"radar_config", "decimate_to_hz", "vmd_params", "nrbo_config", "ga_config", "bounds", "sampen_config",
                     "band_spec", "peak_config"});
  PipelineConfig cfg;
  if (top.has("radar_config")) cfg.radar_config = radar_config_from_json(top.at("radar_config"));
  top.number("decimate_to_hz", cfg.decimate_to_hz);
  if (top.has("vmd_params")) cfg.vmd_params = parse_vmd(top.at("vmd_params"));
  if (top.has("nrbo_config")) cfg.nrbo_config = parse_nrbo(top.at("nrbo_config"));
  if (top.has("ga_config")) cfg.ga_config = parse_ga(top.at("ga_config"));
  if (top.has("bounds")) {
    const Section s(top.at("bounds"), "bounds", {"k_range", "alpha_range"});
    s.pair("k_range", cfg.bounds.k_min, cfg.bounds.k_max);
    s.pair("alpha_range", cfg.bounds.alpha_min, cfg.bounds.alpha_max);
  }
  if (top.has("sampen_config")) {
    const Section s(top.at("sampen_config"), "sampen_config", {"embedding_m", "tolerance_r"});
    s.integer("embedding_m", cfg.sampen_config.embedding_m);
    s.number("tolerance_r", cfg.sampen_config.tolerance_r);
  }
  if (top.has("band_spec")) {
    const Section s(top.at("band_spec"), "band_spec", {"low_hz", "high_hz"});
    s.number("low_hz", cfg.band_spec.low_hz);
    s.number("high_hz", cfg.band_spec.high_hz);
  }
  if (top.has("peak_config")) {
    const Section s(top.at("peak_config"), "peak_config", {"window_s", "threshold_k", "refractory_s"});
    s.number("window_s", cfg.peak_config.window_s);
    s.number("threshold_k", cfg.peak_config.threshold_k);
    s.number("refractory_s", cfg.peak_config.refractory_s);
  }
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

json vmd_params_to_json(const VmdParams& p) {
  return {{"k_modes", p.k_modes},     {"alpha", p.alpha},
          {"tau", p.tau},             {"tolerance", p.tolerance},
          {"max_iterations", p.max_iterations}, {"init_mode", init_name(p.init_mode)},
          {"init_seed", p.init_seed}};
}

json pipeline_config_to_json(const PipelineConfig& cfg) {
  const auto& n = cfg.nrbo_config;
  const auto& g = cfg.ga_config;
  return {
      {"radar_config", radar_config_to_json(cfg.radar_config)},
      {"decimate_to_hz", cfg.decimate_to_hz},
      {"vmd_params", vmd_params_to_json(cfg.vmd_params)},
      {"nrbo_config",
       {{"population_n", n.population_n},
        {"max_iterations", n.max_iterations},
        {"seed", n.seed},
        {"proximity_eps", n.proximity_eps},
        {"local_delta_range", {n.local_delta_range[0], n.local_delta_range[1]}},
        {"stall_limit", n.stall_limit},
        {"workers", n.workers}}},
      {"ga_config",
       {{"population_n", g.population_n},
        {"generations", g.generations},
        {"crossover_rate", g.crossover_rate},
        {"mutation_rate", g.mutation_rate},
        {"tournament_size", g.tournament_size},
        {"seed", g.seed},
        {"workers", g.workers}}},
      {"bounds",
       {{"k_range", {cfg.bounds.k_min, cfg.bounds.k_max}}, {"alpha_range", {cfg.bounds.alpha_min, cfg.bounds.alpha_max}}}},
      {"sampen_config", {{"embedding_m", cfg.sampen_config.embedding_m}, {"tolerance_r", cfg.sampen_config.tolerance_r}}},
      {"band_spec", {{"low_hz", cfg.band_spec.low_hz}, {"high_hz", cfg.band_spec.high_hz}}},
      {"peak_config",
       {{"window_s", cfg.peak_config.window_s},
        {"threshold_k", cfg.peak_config.threshold_k},
        {"refractory_s", cfg.peak_config.refractory_s}}},
  };
}

}  // namespace radarhr
