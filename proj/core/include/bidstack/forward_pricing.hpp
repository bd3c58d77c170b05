/**
 * @file forward_pricing.hpp
 * @brief Electricity forwards and power-price moments under the two-fuel stack.
 *
 * Fuels are jointly lognormal at maturity and demand is a Gaussian clamped to
 * [0, cap].  Fuel forwards stand in for the log means throughout.
 */
#pragma once

#include <functional>
#include <optional>

#include "bidstack/bid_stack.hpp"
#include "bidstack/market_models.hpp"

namespace bidstack {

struct PricingInputs {
  FuelBid coal_bid{"coal", 2.0, 1.0, 0.5};
  FuelBid gas_bid{"gas", 2.0, 1.0, 0.5};
  FuelTerminalLaw law;  ///< vols and correlation; log means come from @ref forwards
  DemandLaw demand;
  FuelForwards forwards;
  double rate = 0.0;
  double maturity = 1.0;
  std::optional<SpikeParams> spike;

  void validate() const;
};

/// Inputs at one maturity of a scenario.
PricingInputs make_pricing_inputs(const ScenarioSpec& spec, double maturity,
                                  std::optional<SpikeParams> spike = std::nullopt);

/// Coal and gas swapped everywhere (bids, vols, forwards).
PricingInputs swap_fuels(const PricingInputs& in);

/// Demand bands split at the smaller and larger capacity.
enum class DemandBand { low, mid, high };

/// Band containing @p xi (ties go to the lower band).
DemandBand demand_band(const PricingInputs& in, double xi);

/// E[b(xi, S_T)] on one band. @throws std::invalid_argument if xi is outside the band.
double forward_integrand(DemandBand band, double xi, const PricingInputs& in);

/// E[b(xi, S_T)^n] for fixed demand xi in [0, cap].
double conditional_moment(int n, double xi, const PricingInputs& in);

/// Absolutely continuous part of the demand law on (0, cap) plus the two atoms.
struct DemandDensity {
  std::function<double(double)> pdf;
  double p_zero = 0.0;
  double p_cap = 0.0;
};

DemandDensity truncated_gaussian_density(const DemandLaw& d);

/// Band-split adaptive quadrature against the model's own Gaussian demand.
/// Spike terms, when present, are integrated numerically as well.
double forward_price_quadrature(const PricingInputs& in);

/// Quadrature against an arbitrary demand density.
/// @throws std::invalid_argument if the density plus atoms is not normalised
/// to 1e-6, or if spike parameters are set.
double forward_price_quadrature(const PricingInputs& in, const DemandDensity& density);

/// Closed-form forward, including the spike terms when @c in.spike is set.
double forward_price_closed(const PricingInputs& in);

/// Expected extra price from the negative-price and spike regimes.
double spike_forward_correction(const DemandLaw& d, const SpikeParams& spike);

/// Closed-form E[P_T^n] of the base stack (no spike terms).
double power_moment(int n, const PricingInputs& in);

double power_variance(const PricingInputs& in);

}  // namespace bidstack
