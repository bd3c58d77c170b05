/**
 * @file commands.hpp
 * @brief Subcommands of the bidstack tool, callable without a process.
 *
 * Each command returns the full CSV text; @ref run handles arguments,
 * atomic output and error reporting.
 */
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace bidstack::cli {

/// 17 significant digits, '.' decimal.
std::string format_number(double x);

/// price,region
std::string cmd_price_spot(const RunConfig& cfg);

/// rho,T,closed,quadrature,mc,mc_se
std::string cmd_price_forward(const RunConfig& cfg);

/// rho,T,h,stack,margrabe,cointegration,implied_corr (empty when not available)
std::string cmd_price_spread(const RunConfig& cfg);

struct PlantReport {
  std::string csv;  ///< mu_d,scenario,model,value
  bool crossover = false;
};

PlantReport cmd_value_plant(const RunConfig& cfg, bool exact_hours);

/// rho,T,h,stack,implied_corr
std::string cmd_implied_corr(const RunConfig& cfg);

/// path,t,s_c,s_g,x,d,price
std::string cmd_simulate(const RunConfig& cfg);

/// scenario,coal_forward_1y,gas_forward_1y,description
std::string cmd_scenario_list();

/// Writes to a temporary sibling and renames it over @p path.
void write_atomic(const std::string& path, const std::string& content);

/// Full command-line entry point.  Returns the process exit status:
/// 0 on success, 2 for usage or validation errors, 1 for anything else.
/// Errors are reported on @p err as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bidstack::cli
