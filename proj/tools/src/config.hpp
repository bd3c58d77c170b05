/**
 * @file config.hpp
 * @brief JSON run configuration for the command-line tool.
 *
 * Every key is optional; missing keys fall back to the default parameter
 * block.  Unknown keys and wrong types are rejected before any computation.
 * The accepted layout is published in tools/config.schema.json.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bidstack/forward_pricing.hpp"
#include "bidstack/mc_oracle.hpp"
#include "bidstack/reference_models.hpp"
#include "bidstack/spread_pricing.hpp"

namespace bidstack::cli {

/// Invalid configuration. @c path names the offending key, e.g. "demand.sigma_d".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct SpotQuery {
  std::optional<double> demand;  ///< D in [0, cap]
  std::optional<double> x;       ///< unclamped driver, used with spikes
  double s_c = 10.0;
  double s_g = 10.0;
};

struct PlantSettings {
  double capacity_mw = 1000.0;
  double years = 3.0;
  std::optional<double> heat_rate;  ///< default: median heat rate of the leg fuel
  double cache_step_hours = 168.0;
  std::vector<double> crossover_maturities;  ///< default: quarterly up to the plant life
};

struct SimulateSettings {
  double horizon = 1.0;
  std::uint64_t paths = 10;  ///< separate from mc.paths, every path point is written out
  double demand_kappa = 100.0;  ///< stationary sd of X matches demand.sigma_d
};

struct RunConfig {
  ScenarioSpec scenario = make_scenario(ScenarioId::I);
  SpikeParams spike{50.0, 50.0};  ///< used only when spikes are switched on
  bool spike_enabled = false;
  SpotQuery spot;
  std::vector<double> maturities{0.25, 1.0, 3.0};
  std::vector<double> heat_rates;    ///< default: e^2.1, e^2.25, e^2.4
  std::vector<double> correlations;  ///< default: dynamics.varrho
  std::vector<double> mu_grid{0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  SpreadLeg leg = SpreadLeg::dark;
  MatchPolicy match;
  bool cointegration = true;
  SimConfig mc{100'000, 365, 20240601, true, 0};
  PlantSettings plant;
  SimulateSettings simulate;

  /// Runs the module-level validation for every populated block.
  void validate() const;
};

/// Parses a configuration document. @throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads and parses a file. @throws ConfigError, including for malformed JSON.
RunConfig load_config(const std::string& path);

/// Heat rates used when the configuration gives none.
std::vector<double> default_heat_rates();

}  // namespace bidstack::cli
