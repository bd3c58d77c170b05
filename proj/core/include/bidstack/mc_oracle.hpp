/**
 * @file mc_oracle.hpp
 * @brief Monte Carlo estimators used to check the closed forms, and path simulation.
 *
 * Randomness: the sample index space is cut into fixed chunks of
 * @ref kChunkSize draws.  Chunk c runs its own std::mt19937_64 seeded through
 * std::seed_seq from (seed, c), so results do not depend on the thread count.
 * Normals come from the inverse CDF; antithetic partners negate every draw.
 * Chunk statistics are merged in chunk order.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "bidstack/forward_pricing.hpp"
#include "bidstack/spread_pricing.hpp"

namespace bidstack {

inline constexpr std::uint64_t kChunkSize = 8192;

struct SimConfig {
  std::uint64_t n_paths = 1'000'000;
  int n_steps = 1;  ///< path simulation only
  std::uint64_t seed = 20240601;
  bool antithetic = true;
  unsigned threads = 0;  ///< 0 picks std::thread::hardware_concurrency()

  void validate() const;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_effective = 0;  ///< independent observations (pairs when antithetic)
};

struct TerminalSample {
  double s_c, s_g, d, x;
};

/// Draws in pair order: each base draw is followed by its mirror when antithetic.
std::vector<TerminalSample> sample_terminal(const FuelTerminalLaw& law, const DemandLaw& demand,
                                            const SimConfig& cfg);

/// Means and co-moments of a vector payoff. Antithetic pairs are averaged first.
struct MomentSummary {
  std::uint64_t n = 0;
  std::vector<double> mean;
  std::vector<double> comoment;  ///< k x k, row major, sum of cross deviations

  double covariance(std::size_t i, std::size_t j) const;
  Estimate estimate(std::size_t i) const;
};

using VectorPayoff = std::function<void(const TerminalSample&, double* out)>;

MomentSummary mc_summarize(const FuelTerminalLaw& law, const DemandLaw& demand,
                           const SimConfig& cfg, std::size_t k, const VectorPayoff& payoff);

Estimate mc_expectation(const FuelTerminalLaw& law, const DemandLaw& demand, const SimConfig& cfg,
                        const std::function<double(const TerminalSample&)>& payoff);

/// Law of the log fuels implied by the forwards in @p in.
FuelTerminalLaw sampling_law(const PricingInputs& in);

/// Spot price of a sample under the inputs' stack (extended when spikes are set).
double sample_price(const PricingInputs& in, const TerminalSample& s);

Estimate mc_forward(const PricingInputs& in, const SimConfig& cfg);
Estimate mc_spread(const PricingInputs& in, const SpreadSpec& spec, const SimConfig& cfg);
/// E[P^n] of the base stack.
Estimate mc_moment(int n, const PricingInputs& in, const SimConfig& cfg);
/// Sample variance of P with a delta-method standard error.
Estimate mc_power_variance(const PricingInputs& in, const SimConfig& cfg);

/// Demand driver X_t = seasonal(t) + Y_t with Y an OU process.
struct DemandPathSpec {
  double kappa = 1.0;
  double mean = 0.5;
  double vol = 0.2;
  double x0 = 0.5;
  std::function<double(double)> seasonal;  ///< optional
};

struct PathPoint {
  double t, s_c, s_g, x, d, price;
};

using SpotPath = std::vector<PathPoint>;

/// Exact OU transitions on a uniform grid of cfg.n_steps steps over the horizon.
std::vector<SpotPath> simulate_spot_paths(const FuelDynamics& dyn, const FuelBid& coal,
                                          const FuelBid& gas, const DemandPathSpec& demand,
                                          std::optional<SpikeParams> spike, double horizon,
                                          const SimConfig& cfg);

/// CSV dump with columns path,t,s_c,s_g,x,d,price.
void write_paths_csv(std::ostream& os, const std::vector<SpotPath>& paths);

}  // namespace bidstack
