/**
 * @file plant_valuation.hpp
 * @brief A generating unit valued as a strip of hourly spot spread options.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bidstack/market_models.hpp"
#include "bidstack/reference_models.hpp"
#include "bidstack/spread_pricing.hpp"

namespace bidstack {

struct PlantSpec {
  SpreadLeg leg = SpreadLeg::dark;
  double heat_rate = 9.487735836358526;
  double capacity_mw = 1000.0;
  std::vector<double> hours;  ///< maturities in years, strictly increasing
  double rate = 0.0;

  void validate() const;
};

/// Hour midpoints (j + 1/2) / 8760 for j < years * 8760.
std::vector<double> hourly_maturities(double years);

enum class ValuationMode {
  exact,   ///< one closed-form price per hour
  cached,  ///< prices on a coarse maturity grid, linearly interpolated
};

struct ValuationOptions {
  ValuationMode mode = ValuationMode::cached;
  double cache_step = 168.0 / 8760.0;  ///< one week
};

/// Sum over hours of capacity * f(T_j), with f evaluated per the mode.
double strip_sum(const std::vector<double>& hours, const std::function<double(double)>& per_hour,
                 const ValuationOptions& opt);

/// Capacity times the sum of discounted spread prices at each hour, all with
/// the same demand law.
double plant_value(const PlantSpec& plant, const ScenarioSpec& scenario, const DemandLaw& demand,
                   std::optional<SpikeParams> spike, const ValuationOptions& opt = {});

/// Settings for the benchmark curves computed next to the stack curve.
struct SweepOptions {
  ValuationOptions valuation;
  bool margrabe = true;
  bool cointegration = false;
  double rho_pi = 0.0;  ///< power-fuel correlation used by Margrabe
  MatchPolicy policy;   ///< unmatched moments come from scenario I
  std::uint64_t cointegration_paths = 20000;
  std::uint64_t seed = 20240601;
  double cointegration_step = 0.25;  ///< maturity grid for the simulated curve
  unsigned threads = 0;
};

struct SweepRow {
  double mu_d = 0.0;
  std::string scenario;
  std::string model;  ///< stack, margrabe or cointegration
  double value = 0.0;
};

/// Margrabe price for one hour with moments matched per the policy.
double margrabe_hour(const PlantSpec& plant, const ScenarioSpec& scenario, const DemandLaw& demand,
                     double maturity, const SweepOptions& opt);

std::vector<SweepRow> plant_value_sweep(const PlantSpec& plant, const ScenarioSpec& scenario,
                                        const std::vector<double>& mu_grid,
                                        std::optional<SpikeParams> spike, const SweepOptions& opt);

/// mu_d,scenario,model,value with 17 significant digits.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// A (maturity, mu_d) point where Margrabe prices the hourly option below the stack.
struct Crossover {
  double maturity, mu_d, stack, margrabe;
};

std::vector<Crossover> margrabe_crossovers(const PlantSpec& plant, const ScenarioSpec& scenario,
                                           const std::vector<double>& mu_grid,
                                           const std::vector<double>& maturities,
                                           std::optional<SpikeParams> spike, const SweepOptions& opt);

}  // namespace bidstack
