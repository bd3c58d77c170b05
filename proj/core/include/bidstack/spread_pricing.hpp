/**
 * @file spread_pricing.hpp
 * @brief Zero-strike dark and spark spread options on spot power.
 *
 * Payoff (P_T - h S^i_T)^+ for the leg fuel i.  A spark spread is a dark
 * spread with the two fuels relabelled.
 */
#pragma once

#include <array>

#include "bidstack/forward_pricing.hpp"

namespace bidstack {

enum class SpreadLeg { dark, spark };

const char* leg_label(SpreadLeg leg);
SpreadLeg parse_leg(const std::string& s);

struct SpreadSpec {
  SpreadLeg leg = SpreadLeg::dark;
  double heat_rate = 9.487735836358526;  ///< e^2.25
  double maturity = 1.0;
};

/// Quantity xi^h = (log h - k) / m offered below the heat rate.
/// @throws std::invalid_argument unless e^k <= h <= e^(k + m cap).
double heat_rate_quantity(double h, const FuelBid& leg_bid);

/// Median market heat rate exp(k + m cap / 2) of a fuel.
double median_heat_rate(const FuelBid& bid);

/// Demand levels splitting the payoff into seven regions, raw and standardised.
struct Breakpoints {
  std::array<double, 8> grid{};
  std::array<double, 8> a{};
};

/// @p leg is the option's fuel, @p other the competing fuel.
/// @throws std::invalid_argument if sigma_d == 0.
Breakpoints spread_breakpoints(const FuelBid& leg, const FuelBid& other, const DemandLaw& demand,
                               double xi_h);

/// Regions between consecutive grid points, in order.
enum class SpreadRegion { low2, low1, mid3, mid2, mid1, high2, high1 };

/// Undiscounted E[(b(xi, S) - h S^leg)^+] on one region.
/// @throws std::invalid_argument if xi is outside the region.
double spread_integrand(SpreadRegion region, double xi, const PricingInputs& in,
                        const SpreadSpec& spec);

/// Adaptive quadrature over the seven regions plus the capacity atom.
double spread_price_quadrature(const PricingInputs& in, const SpreadSpec& spec);

/// Closed form; includes spike terms when @c in.spike is set.
double spread_price_closed(const PricingInputs& in, const SpreadSpec& spec);

/// Closed-form spark spread regardless of @c spec.leg.
double spark_spread_price(const PricingInputs& in, const SpreadSpec& spec);

}  // namespace bidstack
