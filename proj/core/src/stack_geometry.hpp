// Shared derived quantities for the closed forms. Index 0 is coal, 1 is gas.
#pragma once

#include <cmath>

#include "bidstack/forward_pricing.hpp"
#include "bidstack/gauss_kernel.hpp"

namespace bidstack::detail {

struct Geometry {
  double k[2], m[2], cap[2];
  double log_f[2];
  double sig[2];
  double cov;    // rho * sig_c * sig_g
  double sigma;  // vol of log S^g - log S^c
  double alpha[2], beta, gamma;
  double total_cap;
  int minus, plus;  // smaller / larger capacity; a tie makes coal the smaller
  double mu_d, sigma_d;

  explicit Geometry(const PricingInputs& in) {
    const FuelBid* b[2] = {&in.coal_bid, &in.gas_bid};
    for (int i = 0; i < 2; ++i) {
      k[i] = b[i]->k;
      m[i] = b[i]->m;
      cap[i] = b[i]->cap;
    }
    log_f[0] = std::log(in.forwards.coal);
    log_f[1] = std::log(in.forwards.gas);
    sig[0] = in.law.sigma_c;
    sig[1] = in.law.sigma_g;
    cov = in.law.rho * sig[0] * sig[1];
    sigma = in.law.spread_vol();
    const auto c = two_fuel_coefficients(in.coal_bid, in.gas_bid);
    alpha[0] = c.alpha_c;
    alpha[1] = c.alpha_g;
    beta = c.beta;
    gamma = c.gamma;
    total_cap = cap[0] + cap[1];
    minus = cap[0] <= cap[1] ? 0 : 1;
    plus = 1 - minus;
    mu_d = in.demand.mu_d;
    sigma_d = in.demand.sigma_d;
  }

  /// Log of b_i(xi, F^i).
  double log_b(int i, double xi) const { return k[i] + m[i] * xi + log_f[i]; }

  /// Log of the joint-marginal bid at the forwards.
  double log_bcg(double xi) const {
    return alpha[0] * log_f[0] + alpha[1] * log_f[1] + beta + gamma * xi;
  }

  /// Mean of (log S^j - log S^i) under the S_i^n tilt, shifted by the bid gap:
  /// fuel i alone at quantity x_i beats fuel j at x_j iff this variable is positive.
  double R(int n, int i, double x_i, double x_j) const {
    const int j = 1 - i;
    return k[j] + m[j] * x_j - k[i] - m[i] * x_i + log_f[j] - log_f[i] -
           (n - 0.5) * sig[i] * sig[i] - 0.5 * sig[j] * sig[j] + n * cov;
  }

  /// log E[S_i^n] - n log F^i.
  double fuel_tilt(int n, int i) const { return 0.5 * (n * n - n) * sig[i] * sig[i]; }

  /// log E[(S_c^alpha_c S_g^alpha_g)^n] - n log(F_c^alpha_c F_g^alpha_g).
  double joint_tilt(int n) const {
    const double q = alpha[0] * alpha[0] * sig[0] * sig[0] + alpha[1] * alpha[1] * sig[1] * sig[1] +
                     2.0 * alpha[0] * alpha[1] * cov;
    const double l = alpha[0] * sig[0] * sig[0] + alpha[1] * sig[1] * sig[1];
    return 0.5 * (n * n * q - n * l);
  }

  /// Shift of R under the joint tilt: n alpha_j sigma^2.
  double joint_shift(int n, int i) const { return n * alpha[1 - i] * sigma * sigma; }

  /// Phi(num / sigma) with the sigma = 0 limit.
  double cdf(double num) const { return norm_cdf_ratio(num, sigma); }

  /// (x - mu_d) / sigma_d with infinities preserved.
  double z(double x) const { return (x - mu_d) / sigma_d; }
};

/// E[b(xi, S)^n] on a band chosen by the caller.
double band_moment(const Geometry& g, DemandBand band, int n, double xi);

}  // namespace bidstack::detail
