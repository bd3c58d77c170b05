#include "bidstack/forward_pricing.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bidstack/gauss_kernel.hpp"
#include "stack_geometry.hpp"

namespace bidstack {

namespace {

using detail::Geometry;
constexpr double kInf = std::numeric_limits<double>::infinity();

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
}

void check_order(int n) {
  if (n < 1) throw std::invalid_argument("moment order must be >= 1");
}

}  // namespace

// E[b^n | D = xi] on the band the caller has already chosen.
double detail::band_moment(const Geometry& g, DemandBand band, int n, double xi) {
  double v = 0.0;
  switch (band) {
    case DemandBand::low: {
      double joint = 1.0;
      for (int i = 0; i < 2; ++i) {
        const double r = g.R(n, i, xi, 0.0);
        v += std::exp(n * g.log_b(i, xi) + g.fuel_tilt(n, i)) * g.cdf(r);
        joint -= g.cdf(r + g.joint_shift(n, i));
      }
      v += std::exp(n * g.log_bcg(xi) + g.joint_tilt(n)) * joint;
      break;
    }
    case DemandBand::mid: {
      const int p = g.plus;
      const int q = g.minus;
      const double r_alone = g.R(n, p, xi, 0.0);
      const double r_sat = g.R(n, p, xi - g.cap[q], g.cap[q]);
      const double tilt = g.fuel_tilt(n, p);
      v += std::exp(n * g.log_b(p, xi - g.cap[q]) + tilt) * g.cdf(-r_sat);
      v += std::exp(n * g.log_b(p, xi) + tilt) * g.cdf(r_alone);
      v += std::exp(n * g.log_bcg(xi) + g.joint_tilt(n)) *
           (g.cdf(r_sat + g.joint_shift(n, p)) - g.cdf(r_alone + g.joint_shift(n, p)));
      break;
    }
    case DemandBand::high: {
      double joint = -1.0;
      for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        const double r = g.R(n, i, xi - g.cap[j], g.cap[j]);
        v += std::exp(n * g.log_b(i, xi - g.cap[j]) + g.fuel_tilt(n, i)) * g.cdf(-r);
        joint += g.cdf(r + g.joint_shift(n, i));
      }
      v += std::exp(n * g.log_bcg(xi) + g.joint_tilt(n)) * joint;
      break;
    }
  }
  return v;
}

namespace {

using detail::band_moment;

DemandBand band_of(const Geometry& g, double xi) {
  if (xi <= g.cap[g.minus]) return DemandBand::low;
  if (xi <= g.cap[g.plus]) return DemandBand::mid;
  return DemandBand::high;
}

double clamp_demand(const DemandLaw& d) { return std::clamp(d.mu_d, 0.0, d.cap); }

// Spike terms for a point-mass driver at x.
double spike_point(const DemandLaw& d, const SpikeParams& s, double x) {
  if (x < 0.0) return 1.0 - std::exp(-s.m_n * x);
  if (x > d.cap) return std::exp(s.m_s * (x - d.cap)) - 1.0;
  return 0.0;
}

// Closed-form E[P^n] for sigma_d > 0.
double closed_moment(const PricingInputs& in, int n) {
  const Geometry g(in);
  const double sd = g.sigma_d;
  const DemandAtoms atoms = demand_atoms(in.demand);
  double total = atoms.p_zero * band_moment(g, DemandBand::low, n, 0.0) +
                 atoms.p_cap * band_moment(g, DemandBand::high, n, g.total_cap);

  const double joint_scale =
      std::exp(n * g.log_bcg(g.mu_d) + g.joint_tilt(n) + 0.5 * n * n * g.gamma * g.gamma * sd * sd);
  const double gshift = n * g.gamma * sd;

  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    const double mi = g.m[i];
    const double sid = std::sqrt(mi * mi * sd * sd + g.sigma * g.sigma);
    const double rho = mi * sd / sid;
    const double tilt = g.fuel_tilt(n, i) + 0.5 * n * n * mi * mi * sd * sd;
    const double shift = n * mi * sd;

    // Fuel i alone, demand in [0, cap_i].
    {
      const double y = (g.R(n, i, g.mu_d, 0.0) - n * mi * mi * sd * sd) / sid;
      const std::array<double, 1> up{g.z(g.cap[i]) - shift};
      const std::array<double, 1> lo{g.z(0.0) - shift};
      total += std::exp(n * g.log_b(i, g.mu_d) + tilt) * binorm_strip(up, lo, y, rho);
    }
    // Fuel i marginal with j saturated, demand in [cap_j, cap].
    {
      const double y = (-g.R(n, i, g.mu_d - g.cap[j], g.cap[j]) + n * mi * mi * sd * sd) / sid;
      const std::array<double, 1> up{g.z(g.total_cap) - shift};
      const std::array<double, 1> lo{g.z(g.cap[j]) - shift};
      total += std::exp(n * g.log_b(i, g.mu_d - g.cap[j]) + tilt) * binorm_strip(up, lo, y, -rho);
    }
    // Joint-marginal part. For the larger-capacity fuel the complementary
    // probability is integrated instead, which leaves only these two strips.
    {
      const double delta = i == g.plus ? -1.0 : 1.0;
      const double common = g.joint_shift(n, i) - n * g.gamma * mi * sd * sd;
      const double y1 = (g.R(n, i, g.mu_d, 0.0) + common) / (delta * sid);
      const double y2 = (g.R(n, i, g.mu_d - g.cap[j], g.cap[j]) + common) / (delta * sid);
      const double r = rho / delta;
      const std::array<double, 1> up1{g.z(g.cap[i]) - gshift};
      const std::array<double, 1> lo1{g.z(0.0) - gshift};
      const std::array<double, 1> up2{g.z(g.total_cap) - gshift};
      const std::array<double, 1> lo2{g.z(g.cap[j]) - gshift};
      total += delta * joint_scale *
               (-binorm_strip(up1, lo1, y1, r) + binorm_strip(up2, lo2, y2, r));
    }
  }
  return total;
}

}  // namespace

void PricingInputs::validate() const {
  coal_bid.validate();
  gas_bid.validate();
  law.validate();
  demand.validate();
  if (std::abs(demand.cap - (coal_bid.cap + gas_bid.cap)) > 1e-12 * demand.cap) {
    throw std::invalid_argument("demand cap must equal the total stack capacity");
  }
  if (!(forwards.coal > 0.0) || !(forwards.gas > 0.0)) {
    throw std::invalid_argument("fuel forwards must be > 0");
  }
  if (!(maturity > 0.0)) throw std::invalid_argument("maturity must be > 0");
  if (!std::isfinite(rate)) throw std::invalid_argument("rate must be finite");
  if (spike) spike->validate();
}

PricingInputs make_pricing_inputs(const ScenarioSpec& spec, double maturity,
                                  std::optional<SpikeParams> spike) {
  const ScenarioState st = scenario_build(spec, maturity);
  PricingInputs in;
  in.coal_bid = spec.base.coal;
  in.gas_bid = spec.base.gas;
  in.law = st.law;
  in.demand = st.demand;
  in.forwards = st.forwards;
  in.rate = spec.base.rate;
  in.maturity = maturity;
  in.spike = spike;
  return in;
}

PricingInputs swap_fuels(const PricingInputs& in) {
  PricingInputs out = in;
  std::swap(out.coal_bid, out.gas_bid);
  std::swap(out.law.mu_c, out.law.mu_g);
  std::swap(out.law.sigma_c, out.law.sigma_g);
  std::swap(out.forwards.coal, out.forwards.gas);
  return out;
}

DemandBand demand_band(const PricingInputs& in, double xi) { return band_of(Geometry(in), xi); }

double forward_integrand(DemandBand band, double xi, const PricingInputs& in) {
  in.validate();
  const Geometry g(in);
  const double lo_edge = g.cap[g.minus];
  const double hi_edge = g.cap[g.plus];
  bool ok = false;
  switch (band) {
    case DemandBand::low: ok = xi >= 0.0 && xi <= lo_edge; break;
    case DemandBand::mid: ok = xi > lo_edge && xi <= hi_edge; break;
    case DemandBand::high: ok = xi > hi_edge && xi <= g.total_cap; break;
  }
  if (!ok) throw std::invalid_argument("forward_integrand: demand outside the band");
  return band_moment(g, band, 1, xi);
}

double conditional_moment(int n, double xi, const PricingInputs& in) {
  check_order(n);
  in.validate();
  const Geometry g(in);
  if (!(xi >= 0.0 && xi <= g.total_cap)) {
    throw std::invalid_argument("conditional_moment: demand outside [0, cap]");
  }
  return band_moment(g, band_of(g, xi), n, xi);
}

DemandDensity truncated_gaussian_density(const DemandLaw& d) {
  d.validate();
  if (d.sigma_d == 0.0) throw std::invalid_argument("a point-mass demand has no density");
  const DemandAtoms atoms = demand_atoms(d);
  const double mu = d.mu_d;
  const double sd = d.sigma_d;
  return {[mu, sd](double x) { return norm_pdf((x - mu) / sd) / sd; }, atoms.p_zero, atoms.p_cap};
}

double forward_price_quadrature(const PricingInputs& in, const DemandDensity& density) {
  in.validate();
  if (in.spike) {
    throw std::invalid_argument("spike terms need the Gaussian driver; use the model density");
  }
  const Geometry g(in);
  const double edges[4] = {0.0, g.cap[g.minus], g.cap[g.plus], g.total_cap};
  const DemandBand bands[3] = {DemandBand::low, DemandBand::mid, DemandBand::high};

  double mass = density.p_zero + density.p_cap;
  for (int b = 0; b < 3; ++b) mass += integrate(density.pdf, edges[b], edges[b + 1]);
  if (std::abs(mass - 1.0) > 1e-6) {
    throw std::invalid_argument("demand density plus atoms does not integrate to one");
  }

  double total = density.p_zero * band_moment(g, DemandBand::low, 1, 0.0) +
                 density.p_cap * band_moment(g, DemandBand::high, 1, g.total_cap);
  for (int b = 0; b < 3; ++b) {
    const DemandBand band = bands[b];
    total += integrate([&](double xi) { return band_moment(g, band, 1, xi) * density.pdf(xi); },
                       edges[b], edges[b + 1]);
  }
  return total;
}

double forward_price_quadrature(const PricingInputs& in) {
  in.validate();
  if (in.demand.sigma_d == 0.0) {
    const double x = in.demand.mu_d;
    double v = conditional_moment(1, clamp_demand(in.demand), in);
    if (in.spike) v += spike_point(in.demand, *in.spike, x);
    return v;
  }
  PricingInputs base = in;
  base.spike.reset();
  double total = forward_price_quadrature(base, truncated_gaussian_density(in.demand));
  if (in.spike) {
    const DemandLaw& d = in.demand;
    const SpikeParams s = *in.spike;
    const double norm = 1.0 / (d.sigma_d * std::sqrt(2.0 * std::numbers::pi));
    // exp(slope * x) times the density, combined in log space to avoid inf * 0.
    auto tilted = [&](double log_scale, double x) {
      const double z = (x - d.mu_d) / d.sigma_d;
      return norm * std::exp(log_scale - 0.5 * z * z);
    };
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return tilted(0.0, x) - tilted(-s.m_n * x, x); }, -kInf, 0.0, 20, 1e-13);
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return tilted(s.m_s * (x - d.cap), x) - tilted(0.0, x); }, d.cap, kInf, 20,
        1e-13);
  }
  return total;
}

double spike_forward_correction(const DemandLaw& d, const SpikeParams& s) {
  d.validate();
  s.validate();
  if (d.sigma_d == 0.0) return spike_point(d, s, d.mu_d);
  const double mu = d.mu_d;
  const double sd = d.sigma_d;
  const double up = (mu - d.cap) / sd;
  return std::exp(s.m_s * (mu - d.cap) + 0.5 * s.m_s * s.m_s * sd * sd) * norm_cdf(up + s.m_s * sd) -
         norm_cdf(up) -
         std::exp(-s.m_n * mu + 0.5 * s.m_n * s.m_n * sd * sd) * norm_cdf(s.m_n * sd - mu / sd) +
         norm_cdf(-mu / sd);
}

double power_moment(int n, const PricingInputs& in) {
  check_order(n);
  in.validate();
  if (in.demand.sigma_d == 0.0) return conditional_moment(n, clamp_demand(in.demand), in);
  return closed_moment(in, n);
}

double forward_price_closed(const PricingInputs& in) {
  double v = power_moment(1, in);
  if (in.spike) v += spike_forward_correction(in.demand, *in.spike);
  return v;
}

double power_variance(const PricingInputs& in) {
  const double m1 = power_moment(1, in);
  return std::max(0.0, power_moment(2, in) - m1 * m1);
}

}  // namespace bidstack
