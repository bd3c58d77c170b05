/**
 * @file bid_stack.hpp
 * @brief Exponential fuel bid curves and the market bid stack.
 *
 * A technology burning fuel i bids quantity xi at s * exp(k + m * xi), where
 * s is the fuel price.  The market clears at the left-continuous generalized
 * inverse of aggregate supply.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bidstack {

struct FuelBid {
  std::string fuel_id;
  double k = 0.0;    ///< level shift, log-price units
  double m = 1.0;    ///< slope per unit quantity, > 0
  double cap = 1.0;  ///< capacity, > 0

  /// @throws std::invalid_argument unless m > 0 and cap > 0.
  void validate() const;
  /// Lowest bid s * e^k.
  double floor_price(double fuel_price) const;
  /// Highest bid s * e^(k + m cap).
  double top_price(double fuel_price) const;
};

/// Demand and one fuel price per bid (same order as the bid list).
struct MarketSnapshot {
  double demand = 0.0;
  std::vector<double> fuel_prices;
};

/// Indices into the bid list.
struct MarginalSets {
  std::vector<std::size_t> marginal;
  std::vector<std::size_t> saturated;
};

/// Exponents of the price on a segment where the fuels in M are all marginal:
/// price = prod_i s_i^alpha_i * exp(beta + gamma * (D - sum of saturated caps)).
struct StackCoefficients {
  std::vector<double> alpha;
  double beta = 0.0;
  double gamma = 0.0;
  double zeta = 0.0;
};

struct SpikeParams {
  double m_n = 1.0;  ///< slope of the negative-price regime below zero demand
  double m_s = 1.0;  ///< slope of the spike regime above full capacity
  void validate() const;
};

/// s * exp(k + m * quantity). @throws std::invalid_argument for quantity outside [0, cap].
double bid_curve_eval(const FuelBid& bid, double quantity, double fuel_price);

/// Quantity supplied at a given power price; clamped to [0, cap].
double bid_curve_inverse(const FuelBid& bid, double price, double fuel_price);

/// Marginal and saturated fuels at the clearing price. At demand 0 both sets are empty.
MarginalSets classify_marginal_sets(std::span<const FuelBid> bids, const MarketSnapshot& snap);

/// @throws std::invalid_argument if @p marginal is empty.
StackCoefficients stack_coefficients(std::span<const FuelBid> marginal);

/// Generic n-fuel clearing price via the sorted breakpoint walk.
double spot_price_nfuel(std::span<const FuelBid> bids, const MarketSnapshot& snap);

/// Case labels for the two-fuel stack.
enum class PriceRegion {
  floor,            ///< zero demand, cheapest floor bid
  coal_only,        ///< P1
  gas_only,         ///< P2
  coal_marginal,    ///< P3: coal marginal, gas saturated
  gas_marginal,     ///< P4: gas marginal, coal saturated
  joint,            ///< P5: both marginal
  negative,         ///< extended model, driver below zero
  spike,            ///< extended model, driver above capacity
};

const char* region_label(PriceRegion r);

struct SpotQuote {
  double price = 0.0;
  PriceRegion region = PriceRegion::floor;
};

struct TwoFuelCoefficients {
  double alpha_c, alpha_g, beta, gamma;
};

TwoFuelCoefficients two_fuel_coefficients(const FuelBid& coal, const FuelBid& gas);

/// Joint-marginal price s_c^alpha_c s_g^alpha_g exp(beta + gamma xi).
double joint_bid(const FuelBid& coal, const FuelBid& gas, double xi, double s_c, double s_g);

/**
 * Explicit two-fuel price split into low / mid / high demand bands.
 * Boundary ties go to the lower-demand case.
 * @throws std::invalid_argument for demand outside [0, cap_c + cap_g] or non-positive prices.
 */
SpotQuote spot_price_twofuel(const FuelBid& coal, const FuelBid& gas, double demand,
                             double s_c, double s_g);

/// Price with the negative-price and spike regimes driven by the unbounded X.
SpotQuote spot_price_extended(const FuelBid& coal, const FuelBid& gas, double x, double s_c,
                              double s_g, const SpikeParams& spike);

/// Number of distinct (M, C) cases for n fuels. @throws std::invalid_argument for n < 1.
std::uint64_t case_count(int n);

}  // namespace bidstack
