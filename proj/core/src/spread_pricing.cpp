#include "bidstack/spread_pricing.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "bidstack/gauss_kernel.hpp"
#include "stack_geometry.hpp"

namespace bidstack {

namespace {

using detail::band_moment;
using detail::Geometry;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Dark-spread pieces with coal as index 0.
struct DarkSpread {
  Geometry g;
  double h, log_h, xi_h, hfc;
  double rt0;  // mean of log S^g - log S^c under the coal tilt

  DarkSpread(const PricingInputs& in, double heat_rate)
      : g(in), h(heat_rate), log_h(std::log(heat_rate)),
        xi_h(heat_rate_quantity(heat_rate, in.coal_bid)), hfc(heat_rate * in.forwards.coal),
        rt0(g.log_f[1] - g.log_f[0] - 0.5 * g.sigma * g.sigma) {}

  // The joint-marginal price beats h S^c iff log S^g - log S^c exceeds this.
  double threshold(double xi) const { return (log_h - g.beta - g.gamma * xi) / g.alpha[1]; }

  double joint_factor() const { return -0.5 * g.alpha[0] * g.alpha[1] * g.sigma * g.sigma; }

  std::array<double, 8> grid() const {
    const double cc = g.cap[0];
    const double cg = g.cap[1];
    return {0.0,
            std::min(cg, xi_h),
            std::min(cc, cg),
            std::max(std::min(cc, cg), xi_h),
            std::min(cc, cg + xi_h),
            cc,
            std::max(cc, cg + xi_h),
            g.total_cap};
  }

  // Coal alone or joint, with the option in the money above the threshold.
  double low_form(double xi) const {
    const double rc = g.R(1, 0, xi, 0.0);
    const double th = threshold(xi);
    const double s2 = g.sigma * g.sigma;
    return std::exp(g.log_b(0, xi)) * g.cdf(rc) - hfc * g.cdf(rt0 - th) +
           std::exp(g.log_bcg(xi) + joint_factor()) *
               (g.cdf(-rc - g.alpha[1] * s2) - g.cdf(th - rt0 - g.alpha[1] * s2));
  }

  // Gas marginal with coal saturated, or joint above the threshold.
  double high_form(double xi) const {
    const double rg = g.R(1, 1, xi - g.cap[0], g.cap[0]);
    const double th = threshold(xi);
    const double s2 = g.sigma * g.sigma;
    return std::exp(g.log_b(1, xi - g.cap[0])) * g.cdf(-rg) - hfc * g.cdf(rt0 - th) +
           std::exp(g.log_bcg(xi) + joint_factor()) *
               (g.cdf(rg + g.alpha[0] * s2) - g.cdf(th - rt0 - g.alpha[1] * s2));
  }

  double region_value(SpreadRegion r, double xi) const {
    switch (r) {
      case SpreadRegion::low2:
      case SpreadRegion::mid3:
        return 0.0;
      case SpreadRegion::low1:
      case SpreadRegion::mid2:
        return low_form(xi);
      case SpreadRegion::mid1:
        return band_moment(g, DemandBand::mid, 1, xi) - hfc;
      case SpreadRegion::high2:
        return high_form(xi);
      case SpreadRegion::high1:
        return band_moment(g, DemandBand::high, 1, xi) - hfc;
    }
    return 0.0;
  }

  // Undiscounted value for fixed demand in [0, cap].
  double conditional(double xi) const {
    if (xi <= 0.0) return 0.0;
    if (xi >= g.total_cap) return band_moment(g, DemandBand::high, 1, g.total_cap) - hfc;
    const auto gr = grid();
    for (int r = 0; r < 7; ++r) {
      if (xi >= gr[r] && xi <= gr[r + 1]) return region_value(static_cast<SpreadRegion>(r), xi);
    }
    return 0.0;
  }

  double closed(const DemandLaw& d) const;
};

double DarkSpread::closed(const DemandLaw& d) const {
  const double sd = d.sigma_d;
  const double mu = d.mu_d;
  const auto gr = grid();
  std::array<double, 8> a;
  for (int i = 0; i < 8; ++i) a[i] = (gr[i] - mu) / sd;

  // Sum of strips over pairs (upper, lower) of 1-based a indices, shifted.
  auto strip = [&](std::initializer_list<std::pair<int, int>> rows, double shift, double y,
                   double rho) {
    double s = 0.0;
    for (auto [u, l] : rows) {
      if (a[u - 1] == a[l - 1]) continue;
      s += binorm_cdf(a[u - 1] - shift, y, rho) - binorm_cdf(a[l - 1] - shift, y, rho);
    }
    return s;
  };

  const double s2 = g.sigma * g.sigma;
  const double mc = g.m[0];
  const double mg = g.m[1];
  const double sdc = std::sqrt(mc * mc * sd * sd + s2);
  const double sdg = std::sqrt(mg * mg * sd * sd + s2);
  const double ag = g.alpha[1];
  const double sgg = std::sqrt(s2 + g.gamma * g.gamma * sd * sd / (ag * ag));
  const double gs = g.gamma * sd;

  double v = 0.0;
  // Coal alone, in the money above xi^h.
  v += std::exp(g.log_b(0, mu) + 0.5 * mc * mc * sd * sd) *
       strip({{6, 4}, {3, 2}}, mc * sd, (g.R(1, 0, mu, 0.0) - mc * mc * sd * sd) / sdc, mc * sd / sdc);
  // Coal marginal with gas saturated, in the money above cap_g + xi^h.
  v += std::exp(g.log_b(0, mu - g.cap[1]) + 0.5 * mc * mc * sd * sd) *
       strip({{8, 7}, {6, 5}}, mc * sd,
             (-g.R(1, 0, mu - g.cap[1], g.cap[1]) + mc * mc * sd * sd) / sdc, -mc * sd / sdc);
  // Gas marginal with coal saturated, always in the money.
  v += std::exp(g.log_b(1, mu - g.cap[0]) + 0.5 * mg * mg * sd * sd) *
       strip({{8, 6}}, mg * sd, (-g.R(1, 1, mu - g.cap[0], g.cap[0]) + mg * mg * sd * sd) / sdg,
             -mg * sd / sdg);
  // Fuel cost where the joint region is cut by the threshold.
  v -= hfc * strip({{7, 6}, {5, 4}, {3, 2}}, 0.0, (rt0 - threshold(mu)) / sgg, -gs / (ag * sgg));
  // Joint-marginal price.
  const double joint = std::exp(g.log_bcg(mu) + joint_factor() + 0.5 * gs * gs);
  v += joint * (strip({{6, 4}, {3, 2}}, gs,
                      (-g.R(1, 0, mu, 0.0) - ag * s2 + g.gamma * mc * sd * sd) / sdc, -mc * sd / sdc) -
                strip({{8, 7}, {6, 5}}, gs,
                      (-g.R(1, 0, mu - g.cap[1], g.cap[1]) - ag * s2 + g.gamma * mc * sd * sd) / sdc,
                      -mc * sd / sdc) +
                strip({{8, 6}}, gs,
                      (g.R(1, 1, mu - g.cap[0], g.cap[0]) + g.alpha[0] * s2 - g.gamma * mg * sd * sd) /
                          sdg,
                      mg * sd / sdg) -
                strip({{7, 6}, {5, 4}, {3, 2}}, gs,
                      (threshold(mu) - rt0 - ag * s2 - gs * gs / ag) / sgg, gs / (ag * sgg)));
  // Capacity atom and the always-in-the-money fuel cost.
  v += norm_cdf(-a[7]) * band_moment(g, DemandBand::high, 1, g.total_cap);
  v -= hfc * (1.0 - norm_cdf(a[6]) + norm_cdf(a[5]) - norm_cdf(a[4]));
  return v;
}

double spike_spread_correction(const DemandLaw& d, const SpikeParams& s) {
  if (d.sigma_d == 0.0) return d.mu_d > d.cap ? std::expm1(s.m_s * (d.mu_d - d.cap)) : 0.0;
  const double up = (d.mu_d - d.cap) / d.sigma_d;
  return std::exp(s.m_s * (d.mu_d - d.cap) + 0.5 * s.m_s * s.m_s * d.sigma_d * d.sigma_d) *
             norm_cdf(up + s.m_s * d.sigma_d) -
         norm_cdf(up);
}

PricingInputs oriented(const PricingInputs& in, SpreadLeg leg) {
  return leg == SpreadLeg::dark ? in : swap_fuels(in);
}

void check_spec(const PricingInputs& in, const SpreadSpec& spec) {
  in.validate();
  if (std::abs(spec.maturity - in.maturity) > 1e-12 * std::max(1.0, in.maturity)) {
    throw std::invalid_argument("spread maturity differs from the pricing inputs");
  }
}

double discount(const PricingInputs& in) { return std::exp(-in.rate * in.maturity); }

}  // namespace

const char* leg_label(SpreadLeg leg) { return leg == SpreadLeg::dark ? "dark" : "spark"; }

SpreadLeg parse_leg(const std::string& s) {
  if (s == "dark" || s == "coal") return SpreadLeg::dark;
  if (s == "spark" || s == "gas") return SpreadLeg::spark;
  throw std::invalid_argument("unknown spread leg '" + s + "' (expected dark or spark)");
}

double heat_rate_quantity(double h, const FuelBid& leg_bid) {
  leg_bid.validate();
  if (!(h > 0.0)) throw std::invalid_argument("heat rate must be > 0");
  const double x = (std::log(h) - leg_bid.k) / leg_bid.m;
  const double tol = 1e-12 * std::max(1.0, leg_bid.cap);
  if (x < -tol || x > leg_bid.cap + tol) {
    throw std::invalid_argument("heat rate outside [exp(k), exp(k + m cap)] of the leg fuel");
  }
  return std::clamp(x, 0.0, leg_bid.cap);
}

double median_heat_rate(const FuelBid& bid) { return std::exp(bid.k + 0.5 * bid.m * bid.cap); }

Breakpoints spread_breakpoints(const FuelBid& leg, const FuelBid& other, const DemandLaw& demand,
                               double xi_h) {
  demand.validate();
  if (demand.sigma_d == 0.0) throw std::invalid_argument("breakpoints need sigma_d > 0");
  if (!(xi_h >= 0.0 && xi_h <= leg.cap)) throw std::invalid_argument("xi_h outside [0, cap]");
  const double cc = leg.cap;
  const double cg = other.cap;
  Breakpoints b;
  b.grid = {0.0,
            std::min(cg, xi_h),
            std::min(cc, cg),
            std::max(std::min(cc, cg), xi_h),
            std::min(cc, cg + xi_h),
            cc,
            std::max(cc, cg + xi_h),
            cc + cg};
  for (int i = 0; i < 8; ++i) b.a[i] = (b.grid[i] - demand.mu_d) / demand.sigma_d;
  return b;
}

double spread_integrand(SpreadRegion region, double xi, const PricingInputs& in,
                        const SpreadSpec& spec) {
  check_spec(in, spec);
  const DarkSpread ds(oriented(in, spec.leg), spec.heat_rate);
  const auto gr = ds.grid();
  const int r = static_cast<int>(region);
  if (!(xi >= gr[r] && xi <= gr[r + 1])) {
    throw std::invalid_argument("spread_integrand: demand outside the region");
  }
  return ds.region_value(region, xi);
}

double spread_price_quadrature(const PricingInputs& in, const SpreadSpec& spec) {
  check_spec(in, spec);
  const PricingInputs o = oriented(in, spec.leg);
  const DarkSpread ds(o, spec.heat_rate);
  const DemandLaw& d = o.demand;
  double v = 0.0;
  if (d.sigma_d == 0.0) {
    v = ds.conditional(std::clamp(d.mu_d, 0.0, d.cap));
    if (o.spike) v += spike_spread_correction(d, *o.spike);
    return discount(in) * v;
  }
  const double norm = 1.0 / (d.sigma_d * std::sqrt(2.0 * std::numbers::pi));
  auto pdf = [&](double x) {
    const double z = (x - d.mu_d) / d.sigma_d;
    return norm * std::exp(-0.5 * z * z);
  };
  const auto gr = ds.grid();
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (int r = 0; r < 7; ++r) {
    if (!(gr[r + 1] > gr[r])) continue;
    const auto region = static_cast<SpreadRegion>(r);
    if (region == SpreadRegion::low2 || region == SpreadRegion::mid3) continue;
    v += GK::integrate([&](double xi) { return ds.region_value(region, xi) * pdf(xi); }, gr[r],
                       gr[r + 1], 15, 1e-13);
  }
  v += demand_atoms(d).p_cap * ds.conditional(d.cap);
  if (o.spike) {
    const double ms = o.spike->m_s;
    v += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) {
          const double z = (x - d.mu_d) / d.sigma_d;
          return norm * (std::exp(ms * (x - d.cap) - 0.5 * z * z) - std::exp(-0.5 * z * z));
        },
        d.cap, kInf, 20, 1e-13);
  }
  return discount(in) * v;
}

double spread_price_closed(const PricingInputs& in, const SpreadSpec& spec) {
  check_spec(in, spec);
  const PricingInputs o = oriented(in, spec.leg);
  const DarkSpread ds(o, spec.heat_rate);
  const DemandLaw& d = o.demand;
  double v = d.sigma_d == 0.0 ? ds.conditional(std::clamp(d.mu_d, 0.0, d.cap)) : ds.closed(d);
  if (o.spike) v += spike_spread_correction(d, *o.spike);
  // cancellation can leave a few ulps below zero for options that are nearly worthless
  return discount(in) * std::max(v, 0.0);
}

double spark_spread_price(const PricingInputs& in, const SpreadSpec& spec) {
  SpreadSpec s = spec;
  s.leg = SpreadLeg::spark;
  return spread_price_closed(in, s);
}

}  // namespace bidstack
