#include "bidstack/reference_models.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bidstack/gauss_kernel.hpp"

namespace bidstack {

double margrabe_sigma(double sigma_p, double sigma_i, double rho_pi) {
  const double v = sigma_p * sigma_p - 2.0 * rho_pi * sigma_p * sigma_i + sigma_i * sigma_i;
  return std::sqrt(std::max(0.0, v));
}

double margrabe_price(double f_p, double f_i, double h, double sigma_pi, double r, double maturity) {
  if (!(f_p > 0.0) || !(f_i > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("margrabe_price: forwards and heat rate must be > 0");
  }
  if (!(sigma_pi >= 0.0)) throw std::invalid_argument("margrabe_price: negative volatility");
  const double df = std::exp(-r * maturity);
  const double strike = h * f_i;
  if (sigma_pi == 0.0) return df * std::max(0.0, f_p - strike);
  const double lm = std::log(f_p / strike);
  const double dp = (lm + 0.5 * sigma_pi * sigma_pi) / sigma_pi;
  return df * (f_p * norm_cdf(dp) - strike * norm_cdf(dp - sigma_pi));
}

LognormalPowerLaw lognormal_from_moments(double mean, double variance, double rho_pi) {
  if (!(mean > 0.0) || !(variance >= 0.0)) {
    throw std::invalid_argument("lognormal_from_moments: need mean > 0 and variance >= 0");
  }
  const double s2 = std::log1p(variance / (mean * mean));
  return {std::log(mean) - 0.5 * s2, std::sqrt(s2), rho_pi};
}

void CointegrationSpec::validate() const {
  if (!(w_c > 0.0) || !(w_g > 0.0)) throw std::invalid_argument("cointegration weights must be > 0");
  if (!(sigma_y >= 0.0)) throw std::invalid_argument("residual vol must be >= 0");
}

std::pair<double, double> cointegration_weights(const FuelBid& coal, double mu_d) {
  coal.validate();
  const double w = 0.5 * std::exp(coal.k + coal.m * mu_d * coal.cap);
  return {w, w};
}

CointegrationSpec match_cointegration(double w_c, double w_g, const FuelTerminalLaw& law,
                                      double target_mean, double target_variance) {
  law.validate();
  const double fc = fuel_forward(law, Fuel::coal);
  const double fg = fuel_forward(law, Fuel::gas);
  const double vc = fc * fc * std::expm1(law.sigma_c * law.sigma_c);
  const double vg = fg * fg * std::expm1(law.sigma_g * law.sigma_g);
  const double cov = fc * fg * std::expm1(law.rho * law.sigma_c * law.sigma_g);
  const double fuel_var = w_c * w_c * vc + w_g * w_g * vg + 2.0 * w_c * w_g * cov;
  CointegrationSpec s{w_c, w_g, target_mean - w_c * fc - w_g * fg,
                      std::sqrt(std::max(0.0, target_variance - fuel_var))};
  s.validate();
  return s;
}

Estimate cointegration_spread_mc(const CointegrationSpec& spec, const FuelTerminalLaw& law,
                                 SpreadLeg leg, double h, double r, double maturity,
                                 std::uint64_t paths, std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (paths < 10000) throw std::invalid_argument("cointegration MC needs at least 10^4 paths");
  SimConfig cfg;
  cfg.n_paths = paths;
  cfg.seed = seed;
  cfg.threads = threads;
  // The demand slot carries a standard normal for Y; the cap is irrelevant here.
  const DemandLaw unit{0.0, 1.0, 1.0};
  const double df = std::exp(-r * maturity);
  const bool dark = leg == SpreadLeg::dark;
  return mc_expectation(law, unit, cfg, [&](const TerminalSample& s) {
    const double p = spec.w_c * s.s_c + spec.w_g * s.s_g + spec.mu_y + spec.sigma_y * s.x;
    return df * std::max(0.0, p - h * (dark ? s.s_c : s.s_g));
  });
}

namespace {

double ou_var(double kappa, double nu, double t) {
  return nu * nu * -std::expm1(-2.0 * kappa * t) / (2.0 * kappa);
}

struct FitData {
  OuKind kind;
  std::vector<MomentTarget> goal;
};

OuFit unpack(OuKind kind, const gsl_vector* x) {
  OuFit f;
  f.kind = kind;
  f.kappa = std::exp(gsl_vector_get(x, 0));
  f.lambda = gsl_vector_get(x, 1);
  f.nu = std::exp(gsl_vector_get(x, 2));
  f.x0 = kind == OuKind::exponential ? std::exp(gsl_vector_get(x, 3)) : gsl_vector_get(x, 3);
  return f;
}

double rel(double model, double target) {
  return (model - target) / std::max(std::abs(target), 1e-300);
}

int residuals(const gsl_vector* x, void* params, gsl_vector* out) {
  const auto* data = static_cast<const FitData*>(params);
  const OuFit f = unpack(data->kind, x);
  for (std::size_t i = 0; i < data->goal.size(); ++i) {
    const auto& g = data->goal[i];
    gsl_vector_set(out, 2 * i, rel(f.mean(g.maturity), g.mean));
    gsl_vector_set(out, 2 * i + 1, rel(f.variance(g.maturity), g.variance));
  }
  return GSL_SUCCESS;
}

}  // namespace

double OuFit::mean(double t) const {
  const double e = std::exp(-kappa * t);
  if (kind == OuKind::arithmetic) return x0 * e + lambda * (1.0 - e);
  const double m = std::log(x0) * e + lambda * (1.0 - e);
  return std::exp(m + 0.5 * ou_var(kappa, nu, t));
}

double OuFit::variance(double t) const {
  const double v = ou_var(kappa, nu, t);
  if (kind == OuKind::arithmetic) return v;
  const double m = mean(t);
  return m * m * std::expm1(v);
}

OuFit moment_match_ou(const std::vector<MomentTarget>& targets, const MatchPolicy& policy,
                      const std::vector<MomentTarget>& reference, OuKind kind) {
  if (targets.size() < 2) throw std::invalid_argument("moment matching needs at least two maturities");
  const bool need_ref = !policy.match_mean || !policy.match_variance;
  if (need_ref && reference.size() != targets.size()) {
    throw std::invalid_argument("reference term structure must align with the targets");
  }
  FitData data{kind, targets};
  bool any_var = false;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto& g = data.goal[i];
    if (!(g.maturity > 0.0)) throw std::invalid_argument("target maturities must be > 0");
    if (need_ref && std::abs(reference[i].maturity - g.maturity) > 1e-12) {
      throw std::invalid_argument("reference maturities differ from the targets");
    }
    if (!policy.match_mean) g.mean = reference[i].mean;
    if (!policy.match_variance) g.variance = reference[i].variance;
    if (kind == OuKind::exponential && !(g.mean > 0.0)) {
      throw std::invalid_argument("exponential OU needs positive mean targets");
    }
    if (!(g.variance >= 0.0)) throw std::invalid_argument("variance targets must be >= 0");
    any_var = any_var || g.variance > 0.0;
  }
  if (!any_var) throw std::invalid_argument("degenerate target: zero variance at every maturity");

  // Start from the exact fit of the shortest and longest maturities at kappa = 1.
  auto by_t = data.goal;
  std::sort(by_t.begin(), by_t.end(),
            [](const MomentTarget& a, const MomentTarget& b) { return a.maturity < b.maturity; });
  const MomentTarget& s = by_t.front();
  const MomentTarget& l = by_t.back();
  auto log_var = [&](const MomentTarget& g) {
    return kind == OuKind::exponential ? std::log1p(g.variance / (g.mean * g.mean)) : g.variance;
  };
  auto log_mean = [&](const MomentTarget& g) {
    return kind == OuKind::exponential ? std::log(g.mean) - 0.5 * log_var(g) : g.mean;
  };
  const double kappa0 = 1.0;
  const double lambda0 = log_mean(l);
  const double nu0 = std::sqrt(std::max(log_var(l), 1e-12) / ou_var(kappa0, 1.0, l.maturity));
  const double es = std::exp(-kappa0 * s.maturity);
  const double start0 = (log_mean(s) - lambda0 * (1.0 - es)) / es;

  const std::size_t n = 2 * data.goal.size();
  const std::size_t p = 4;
  gsl_vector* x = gsl_vector_alloc(p);
  gsl_vector_set(x, 0, std::log(kappa0));
  gsl_vector_set(x, 1, lambda0);
  gsl_vector_set(x, 2, std::log(nu0));
  gsl_vector_set(x, 3, start0);

  gsl_multifit_nlinear_fdf fdf{};
  fdf.f = residuals;
  fdf.df = nullptr;
  fdf.fvv = nullptr;
  fdf.n = n;
  fdf.p = p;
  fdf.params = &data;
  gsl_multifit_nlinear_parameters params = gsl_multifit_nlinear_default_parameters();
  params.trs = gsl_multifit_nlinear_trs_lm;

  gsl_error_handler_t* old = gsl_set_error_handler_off();
  gsl_multifit_nlinear_workspace* w =
      gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, n, p);
  int info = 0;
  gsl_multifit_nlinear_init(x, &fdf, w);
  gsl_multifit_nlinear_driver(500, 1e-15, 1e-15, 1e-15, nullptr, nullptr, &info, w);
  OuFit fit = unpack(kind, gsl_multifit_nlinear_position(w));
  gsl_multifit_nlinear_free(w);
  gsl_vector_free(x);
  gsl_set_error_handler(old);

  for (const auto& g : data.goal) {
    fit.max_rel_residual = std::max(fit.max_rel_residual, std::abs(rel(fit.mean(g.maturity), g.mean)));
    if (g.variance > 0.0) {
      fit.max_rel_residual =
          std::max(fit.max_rel_residual, std::abs(rel(fit.variance(g.maturity), g.variance)));
    }
  }
  return fit;
}

std::optional<double> implied_correlation(double stack_value, double f_p, double f_i, double h,
                                          double sigma_p, double sigma_i, double r, double maturity) {
  constexpr double kEdge = 1.0 - 1e-9;
  auto price = [&](double rho) {
    return margrabe_price(f_p, f_i, h, margrabe_sigma(sigma_p, sigma_i, rho), r, maturity);
  };
  double lo = -kEdge;
  double hi = kEdge;
  const double p_lo = price(lo);  // largest value
  const double p_hi = price(hi);  // smallest value
  if (!(stack_value <= p_lo && stack_value >= p_hi)) return std::nullopt;
  // Decreasing in rho: keep price(lo) >= target >= price(hi).
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (price(mid) >= stack_value) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace bidstack
