/**
 * @file reference_models.hpp
 * @brief Benchmark models: Margrabe exchange option, a cointegration model
 *        priced by simulation, OU moment matching and implied correlation.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bidstack/market_models.hpp"
#include "bidstack/mc_oracle.hpp"
#include "bidstack/spread_pricing.hpp"

namespace bidstack {

/// sqrt(sigma_p^2 - 2 rho sigma_p sigma_i + sigma_i^2), clamped at zero.
double margrabe_sigma(double sigma_p, double sigma_i, double rho_pi);

/// e^{-rT} [F_p Phi(d+) - h F_i Phi(d-)].  @p sigma_pi is the total standard deviation of
/// log(P_T / S^i_T), not an annual rate.  @throws std::invalid_argument for non-positive forwards.
double margrabe_price(double f_p, double f_i, double h, double sigma_pi, double r, double maturity);

/// Lognormal power price at one maturity.
struct LognormalPowerLaw {
  double mu_p = 0.0;
  double sigma_p = 0.0;
  double rho_pi = 0.0;
};

/// Lognormal law with the given mean and variance.
LognormalPowerLaw lognormal_from_moments(double mean, double variance, double rho_pi = 0.0);

/// P = w_c S^c + w_g S^g + Y with Y ~ N(mu_y, sigma_y^2) independent of fuels.
struct CointegrationSpec {
  double w_c = 1.0;
  double w_g = 1.0;
  double mu_y = 0.0;
  double sigma_y = 0.0;

  void validate() const;
};

/// Equal weights (1/2) exp(k_c + m_c mu_d cap_c).
std::pair<double, double> cointegration_weights(const FuelBid& coal, double mu_d);

/// Picks mu_y and sigma_y so the model reproduces a target mean and variance.
/// sigma_y is floored at zero when the fuel part alone already exceeds the target.
CointegrationSpec match_cointegration(double w_c, double w_g, const FuelTerminalLaw& law,
                                      double target_mean, double target_variance);

/// @throws std::invalid_argument if paths < 10^4.
Estimate cointegration_spread_mc(const CointegrationSpec& spec, const FuelTerminalLaw& law,
                                 SpreadLeg leg, double h, double r, double maturity,
                                 std::uint64_t paths, std::uint64_t seed, unsigned threads = 0);

struct MatchPolicy {
  bool match_mean = true;
  bool match_variance = true;
};

struct MomentTarget {
  double maturity = 1.0;
  double mean = 0.0;
  double variance = 0.0;
};

/// exponential: OU for log P; arithmetic: OU for the level itself.
enum class OuKind { exponential, arithmetic };

struct OuFit {
  OuKind kind = OuKind::exponential;
  double kappa = 1.0;
  double lambda = 0.0;
  double nu = 0.0;
  double x0 = 0.0;  ///< starting level (p_0 for the exponential kind)
  double max_rel_residual = 0.0;

  double mean(double maturity) const;
  double variance(double maturity) const;
};

/**
 * Least-squares fit of (kappa, lambda, nu, x0) to a mean/variance term structure.
 * Residuals are relative errors.  Quantities the policy leaves unmatched are
 * taken from @p reference at the same position instead.
 * @throws std::invalid_argument for fewer than two maturities, mismatched
 * reference, or an all-zero variance target.
 */
OuFit moment_match_ou(const std::vector<MomentTarget>& targets, const MatchPolicy& policy,
                      const std::vector<MomentTarget>& reference, OuKind kind = OuKind::exponential);

/// Correlation rho_pi at which Margrabe reproduces @p stack_value, or nullopt when
/// the value lies outside the Margrabe range over rho in [-1 + 1e-9, 1 - 1e-9].
std::optional<double> implied_correlation(double stack_value, double f_p, double f_i, double h,
                                          double sigma_p, double sigma_i, double r, double maturity);

}  // namespace bidstack
