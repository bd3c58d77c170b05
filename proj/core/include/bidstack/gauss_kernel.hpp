/**
 * @file gauss_kernel.hpp
 * @brief Univariate and bivariate standard normal distribution functions.
 *
 * Every closed form in the library reduces to differences of bivariate
 * normal CDFs, so these routines carry the accuracy budget.  Infinite
 * arguments are accepted and stand for unbounded integration limits.
 */
#pragma once

#include <span>
#include <vector>

namespace bidstack {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF. Total on the extended reals.
double norm_cdf(double x);

/// Phi(num / sd + shift * sd), with the sd == 0 case taken as the limit
/// (an indicator of num > 0, one half on the boundary).
double norm_cdf_ratio(double num, double sd, double shift = 0.0);

/**
 * Bivariate standard normal CDF P(X <= x, Y <= y) with corr(X, Y) = rho.
 *
 * Uses Gauss-Legendre quadrature on the arcsine representation, with a
 * separate asymptotic expansion for |rho| >= 0.925.  |rho| within 1e-12
 * of one is routed to the degenerate closed forms.
 *
 * @throws std::invalid_argument if rho is NaN or outside [-1, 1].
 */
double binorm_cdf(double x, double y, double rho);

/// Rows of a strip difference: sum_i [Phi2(upper_i, y; rho) - Phi2(lower_i, y; rho)].
struct StripArgs {
  std::vector<double> upper_rows;
  std::vector<double> lower_rows;
  double second_arg = 0.0;
  double correlation = 0.0;
};

/// @throws std::invalid_argument on mismatched or empty rows, or bad correlation.
double binorm_strip(const StripArgs& args);

/// Same as above without building a StripArgs.
double binorm_strip(std::span<const double> upper, std::span<const double> lower,
                    double y, double rho);

/**
 * Closed form of the Gaussian overlap integral
 *   int_{-inf}^{a} exp(l1 + q1 x) phi(x) Phi(l2 + q2 x) dx.
 * @p a may be +infinity.
 */
double gaussian_exp_overlap(double l1, double l2, double q1, double q2, double a);

}  // namespace bidstack
