#include "config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

namespace bidstack::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError(join(path, k), "unknown key");
  }
}

double number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(path, key), "must be finite");
  return x;
}

std::optional<double> maybe_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return number(obj, path, key, 0.0);
}

bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return obj.at(key).get<bool>();
}

std::uint64_t count(const json& obj, const std::string& path, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(join(path, key), "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& obj, const std::string& path, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(join(path, key), "expected a string");
  return obj.at(key).get<std::string>();
}

std::vector<double> numbers(const json& obj, const std::string& path, const char* key,
                            std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  const std::string p = join(path, key);
  if (!v.is_array()) throw ConfigError(p, "expected an array of numbers");
  if (v.empty()) throw ConfigError(p, "must not be empty");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) {
      throw ConfigError(p, "expected finite numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

FuelBid parse_bid(const json& obj, const std::string& path, FuelBid bid) {
  only_keys(obj, path, {"k", "m", "cap"});
  bid.k = number(obj, path, "k", bid.k);
  bid.m = number(obj, path, "m", bid.m);
  bid.cap = number(obj, path, "cap", bid.cap);
  return bid;
}

template <class F>
void guarded(const std::string& path, F&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

std::vector<double> default_heat_rates() {
  return {std::exp(2.1), std::exp(2.25), std::exp(2.4)};
}

void RunConfig::validate() const {
  guarded("scenario", [&] { scenario.validate(); });
  if (spike_enabled) guarded("spike", [&] { spike.validate(); });
  for (double t : maturities) {
    if (!(t > 0.0)) throw ConfigError("maturities", "maturities must be > 0");
  }
  for (double h : heat_rates) {
    if (!(h > 0.0)) throw ConfigError("heat_rates", "heat rates must be > 0");
  }
  for (double r : correlations) {
    if (!(r >= -1.0 && r <= 1.0)) throw ConfigError("correlations", "correlations must lie in [-1, 1]");
  }
  for (double mu : mu_grid) {
    if (!std::isfinite(mu)) throw ConfigError("mu_grid", "must be finite");
  }
  guarded("mc", [&] { mc.validate(); });
  if (!(plant.capacity_mw > 0.0)) throw ConfigError("plant.capacity_mw", "must be > 0");
  if (!(plant.years > 0.0)) throw ConfigError("plant.years", "must be > 0");
  if (!(plant.cache_step_hours >= 1.0)) throw ConfigError("plant.cache_step_hours", "must be >= 1");
  if (plant.heat_rate && !(*plant.heat_rate > 0.0)) throw ConfigError("plant.heat_rate", "must be > 0");
  if (simulate.paths == 0) throw ConfigError("simulate.paths", "must be >= 1");
  if (!(simulate.horizon > 0.0)) throw ConfigError("simulate.horizon", "must be > 0");
  if (!(simulate.demand_kappa > 0.0)) throw ConfigError("simulate.demand_kappa", "must be > 0");
  if (spot.demand && !(*spot.demand >= 0.0 && *spot.demand <= scenario.base.demand.cap)) {
    throw ConfigError("spot.demand", "must lie in [0, demand.cap]");
  }
  if (!(spot.s_c > 0.0) || !(spot.s_g > 0.0)) throw ConfigError("spot", "fuel prices must be > 0");
}

RunConfig parse_config(const json& doc) {
  only_keys(doc, "",
            {"scenario", "coal", "gas", "dynamics", "demand", "rate", "forward_curves", "levels",
             "spike", "spot", "maturities", "heat_rates", "log_heat_rates", "correlations", "mu_grid",
             "leg", "match", "cointegration", "mc", "plant", "simulate"});
  RunConfig cfg;
  ModelParameters base;
  try {
    cfg.scenario = make_scenario(parse_scenario(text(doc, "", "scenario", "I")), base);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scenario", e.what());
  }
  ScenarioSpec& sc = cfg.scenario;

  if (doc.contains("coal")) sc.base.coal = parse_bid(doc["coal"], "coal", sc.base.coal);
  if (doc.contains("gas")) sc.base.gas = parse_bid(doc["gas"], "gas", sc.base.gas);
  if (doc.contains("dynamics")) {
    const json& d = doc["dynamics"];
    only_keys(d, "dynamics",
              {"kappa_c", "kappa_g", "nu_c", "nu_g", "lambda_c", "lambda_g", "s0_c", "s0_g", "varrho"});
    FuelDynamics& y = sc.base.dynamics;
    y.kappa_c = number(d, "dynamics", "kappa_c", y.kappa_c);
    y.kappa_g = number(d, "dynamics", "kappa_g", y.kappa_g);
    y.nu_c = number(d, "dynamics", "nu_c", y.nu_c);
    y.nu_g = number(d, "dynamics", "nu_g", y.nu_g);
    y.lambda_c = number(d, "dynamics", "lambda_c", y.lambda_c);
    y.lambda_g = number(d, "dynamics", "lambda_g", y.lambda_g);
    y.s0_c = number(d, "dynamics", "s0_c", y.s0_c);
    y.s0_g = number(d, "dynamics", "s0_g", y.s0_g);
    y.varrho = number(d, "dynamics", "varrho", y.varrho);
  }
  if (doc.contains("demand")) {
    const json& d = doc["demand"];
    only_keys(d, "demand", {"mu_d", "sigma_d", "cap"});
    sc.base.demand.mu_d = number(d, "demand", "mu_d", sc.base.demand.mu_d);
    sc.base.demand.sigma_d = number(d, "demand", "sigma_d", sc.base.demand.sigma_d);
    sc.base.demand.cap = number(d, "demand", "cap", sc.base.coal.cap + sc.base.gas.cap);
  } else {
    sc.base.demand.cap = sc.base.coal.cap + sc.base.gas.cap;
  }
  sc.base.rate = number(doc, "", "rate", sc.base.rate);
  if (doc.contains("forward_curves")) {
    if (sc.id != ScenarioId::II) throw ConfigError("forward_curves", "only valid with scenario II");
    const json& f = doc["forward_curves"];
    only_keys(f, "forward_curves", {"coal_level", "coal_step_per_month", "gas_level", "gas_step_per_month"});
    LinearForwardCurves c = *sc.forward_inputs;
    c.coal_level = number(f, "forward_curves", "coal_level", c.coal_level);
    c.coal_step_per_month = number(f, "forward_curves", "coal_step_per_month", c.coal_step_per_month);
    c.gas_level = number(f, "forward_curves", "gas_level", c.gas_level);
    c.gas_step_per_month = number(f, "forward_curves", "gas_step_per_month", c.gas_step_per_month);
    sc.forward_inputs = c;
  }
  if (doc.contains("levels")) {
    if (sc.id != ScenarioId::III) throw ConfigError("levels", "only valid with scenario III");
    const json& l = doc["levels"];
    only_keys(l, "levels", {"lambda_c", "s0_c", "lambda_g", "s0_g"});
    LevelOverrides o = *sc.level_overrides;
    o.lambda_c = number(l, "levels", "lambda_c", o.lambda_c);
    o.s0_c = number(l, "levels", "s0_c", o.s0_c);
    o.lambda_g = number(l, "levels", "lambda_g", o.lambda_g);
    o.s0_g = number(l, "levels", "s0_g", o.s0_g);
    sc.level_overrides = o;
  }
  if (doc.contains("spike")) {
    const json& s = doc["spike"];
    only_keys(s, "spike", {"enabled", "m_n", "m_s"});
    cfg.spike_enabled = boolean(s, "spike", "enabled", false);
    cfg.spike.m_n = number(s, "spike", "m_n", cfg.spike.m_n);
    cfg.spike.m_s = number(s, "spike", "m_s", cfg.spike.m_s);
  }
  if (doc.contains("spot")) {
    const json& s = doc["spot"];
    only_keys(s, "spot", {"demand", "x", "s_c", "s_g"});
    cfg.spot.demand = maybe_number(s, "spot", "demand");
    cfg.spot.x = maybe_number(s, "spot", "x");
    cfg.spot.s_c = number(s, "spot", "s_c", cfg.spot.s_c);
    cfg.spot.s_g = number(s, "spot", "s_g", cfg.spot.s_g);
  }
  cfg.maturities = numbers(doc, "", "maturities", cfg.maturities);
  if (doc.contains("heat_rates") && doc.contains("log_heat_rates")) {
    throw ConfigError("heat_rates", "give either heat_rates or log_heat_rates");
  }
  cfg.heat_rates = numbers(doc, "", "heat_rates", {});
  if (doc.contains("log_heat_rates")) {
    for (double l : numbers(doc, "", "log_heat_rates", {})) cfg.heat_rates.push_back(std::exp(l));
  }
  cfg.correlations = numbers(doc, "", "correlations", {});
  cfg.mu_grid = numbers(doc, "", "mu_grid", cfg.mu_grid);
  try {
    cfg.leg = parse_leg(text(doc, "", "leg", "dark"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("leg", e.what());
  }
  if (doc.contains("match")) {
    const json& m = doc["match"];
    only_keys(m, "match", {"mean", "variance"});
    cfg.match.match_mean = boolean(m, "match", "mean", true);
    cfg.match.match_variance = boolean(m, "match", "variance", true);
  }
  cfg.cointegration = boolean(doc, "", "cointegration", cfg.cointegration);
  if (doc.contains("mc")) {
    const json& m = doc["mc"];
    only_keys(m, "mc", {"paths", "steps", "seed", "antithetic", "threads"});
    cfg.mc.n_paths = count(m, "mc", "paths", cfg.mc.n_paths);
    const std::uint64_t steps = count(m, "mc", "steps", static_cast<std::uint64_t>(cfg.mc.n_steps));
    if (steps > 10'000'000) throw ConfigError("mc.steps", "too many steps");
    cfg.mc.n_steps = static_cast<int>(steps);
    cfg.mc.seed = count(m, "mc", "seed", cfg.mc.seed);
    cfg.mc.antithetic = boolean(m, "mc", "antithetic", cfg.mc.antithetic);
    const std::uint64_t th = count(m, "mc", "threads", cfg.mc.threads);
    if (th > 1024) throw ConfigError("mc.threads", "too many threads");
    cfg.mc.threads = static_cast<unsigned>(th);
  }
  if (doc.contains("plant")) {
    const json& p = doc["plant"];
    only_keys(p, "plant", {"capacity_mw", "years", "heat_rate", "cache_step_hours", "crossover_maturities"});
    cfg.plant.capacity_mw = number(p, "plant", "capacity_mw", cfg.plant.capacity_mw);
    cfg.plant.years = number(p, "plant", "years", cfg.plant.years);
    cfg.plant.heat_rate = maybe_number(p, "plant", "heat_rate");
    cfg.plant.cache_step_hours = number(p, "plant", "cache_step_hours", cfg.plant.cache_step_hours);
    cfg.plant.crossover_maturities = numbers(p, "plant", "crossover_maturities", {});
  }
  if (doc.contains("simulate")) {
    const json& s = doc["simulate"];
    only_keys(s, "simulate", {"horizon", "demand_kappa", "paths"});
    cfg.simulate.horizon = number(s, "simulate", "horizon", cfg.simulate.horizon);
    cfg.simulate.demand_kappa = number(s, "simulate", "demand_kappa", cfg.simulate.demand_kappa);
    cfg.simulate.paths = count(s, "simulate", "paths", cfg.simulate.paths);
    if (cfg.simulate.paths > 100'000) throw ConfigError("simulate.paths", "too many paths");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace bidstack::cli
