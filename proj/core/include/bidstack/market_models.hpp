/**
 * @file market_models.hpp
 * @brief Terminal laws for fuels and demand, exp-OU dynamics, and scenario presets.
 */
#pragma once

#include <optional>
#include <utility>

#include "bidstack/bid_stack.hpp"

namespace bidstack {

enum class Fuel { coal, gas };

/// Joint Gaussian law of (log S^c_T, log S^g_T).
struct FuelTerminalLaw {
  double mu_c = 0.0;
  double mu_g = 0.0;
  double sigma_c = 0.0;
  double sigma_g = 0.0;
  double rho = 0.0;

  void validate() const;
  /// Standard deviation of log S^g - log S^c.
  double spread_vol() const;
};

/// Correlated exponential OU fuel dynamics.
struct FuelDynamics {
  double kappa_c = 1.0, kappa_g = 1.0;
  double nu_c = 0.5, nu_g = 0.5;
  double lambda_c = 0.0, lambda_g = 0.0;  ///< long-run log levels
  double s0_c = 1.0, s0_g = 1.0;          ///< spot fuel prices
  double varrho = 0.0;                    ///< correlation of the driving noises

  void validate() const;
};

/// D_T = clamp(X_T, 0, cap) with X_T ~ N(mu_d, sigma_d^2).
struct DemandLaw {
  double mu_d = 0.5;
  double sigma_d = 0.2;
  double cap = 1.0;

  void validate() const;
};

struct FuelForwards {
  double coal = 1.0;
  double gas = 1.0;
};

FuelTerminalLaw terminal_law_from_dynamics(const FuelDynamics& dyn, double maturity);

double fuel_forward(const FuelTerminalLaw& law, Fuel fuel);

/// Shift the log mean so the forward matches @p observed_forward; vols unchanged.
FuelTerminalLaw calibrate_mean_to_forward(const FuelTerminalLaw& law, Fuel fuel,
                                          double observed_forward);

struct DemandAtoms {
  double p_zero = 0.0;
  double p_cap = 0.0;
};

/// Point masses of D at 0 and at the cap (sigma_d = 0 gives the point-mass limit).
DemandAtoms demand_atoms(const DemandLaw& d);

/// Default parameter block: symmetric coal and gas stacks and dynamics.
struct ModelParameters {
  FuelBid coal{"coal", 2.0, 1.0, 0.5};
  FuelBid gas{"gas", 2.0, 1.0, 0.5};
  FuelDynamics dynamics{1.0, 1.0, 0.5, 0.5, 2.302585092994046, 2.302585092994046, 10.0, 10.0, 0.0};
  DemandLaw demand{0.5, 0.2, 1.0};
  double rate = 0.0;
};

enum class ScenarioId { I, II, III };

const char* scenario_label(ScenarioId id);
ScenarioId parse_scenario(const std::string& s);

/// Linear forward curves: level + step_per_month * 12 T.
struct LinearForwardCurves {
  double coal_level = 10.0;
  double coal_step_per_month = -0.2;
  double gas_level = 10.0;
  double gas_step_per_month = 0.2;

  FuelForwards at(double maturity) const;
};

struct LevelOverrides {
  double lambda_c, s0_c, lambda_g, s0_g;
};

struct ScenarioSpec {
  ScenarioId id = ScenarioId::I;
  ModelParameters base;
  std::optional<LinearForwardCurves> forward_inputs;
  std::optional<LevelOverrides> level_overrides;

  void validate() const;
};

/// Preset: I uses the dynamics as given, II overlays the linear forward curves
/// (coal in backwardation, gas in contango), III moves coal to 7 and gas to 13.
ScenarioSpec make_scenario(ScenarioId id, const ModelParameters& base = {});

struct ScenarioState {
  FuelTerminalLaw law;
  DemandLaw demand;
  FuelForwards forwards;
};

/// @throws std::invalid_argument for T <= 0 or a non-positive curve forward.
ScenarioState scenario_build(const ScenarioSpec& spec, double maturity);

}  // namespace bidstack
