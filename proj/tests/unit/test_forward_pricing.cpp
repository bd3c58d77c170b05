#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "bidstack/forward_pricing.hpp"
#include "oracles.hpp"

using namespace bidstack;
namespace t = bidstack::testing;

namespace {

PricingInputs scenario_inputs(ScenarioId id, double rho, double T) {
  ScenarioSpec s = make_scenario(id);
  s.base.dynamics.varrho = rho;
  return make_pricing_inputs(s, T);
}

PricingInputs asymmetric_inputs() {
  PricingInputs in;
  in.coal_bid = FuelBid{"coal", 1.5, 2.0, 0.3};
  in.gas_bid = FuelBid{"gas", 2.2, 0.7, 0.7};
  in.law = FuelTerminalLaw{0.0, 0.0, 0.35, 0.45, 0.3};
  in.demand = DemandLaw{0.45, 0.18, 1.0};
  in.forwards = FuelForwards{9.0, 11.0};
  in.maturity = 1.0;
  return in;
}

PricingInputs random_inputs(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PricingInputs in;
  const double split = 0.2 + 0.6 * u(gen);
  in.coal_bid = FuelBid{"coal", 1.0 + 2.0 * u(gen), 0.5 + 1.5 * u(gen), split};
  in.gas_bid = FuelBid{"gas", 1.0 + 2.0 * u(gen), 0.5 + 1.5 * u(gen), 1.0 - split};
  in.law = FuelTerminalLaw{0.0, 0.0, 0.1 + 0.5 * u(gen), 0.1 + 0.5 * u(gen), -0.9 + 1.8 * u(gen)};
  in.demand = DemandLaw{0.1 + 0.8 * u(gen), 0.05 + 0.25 * u(gen), 1.0};
  in.forwards = FuelForwards{5.0 + 10.0 * u(gen), 5.0 + 10.0 * u(gen)};
  in.rate = 0.05 * u(gen);
  in.maturity = 0.25 + 2.75 * u(gen);
  return in;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Forward, ClosedMatchesQuadratureOnScenarios) {
  for (ScenarioId id : {ScenarioId::I, ScenarioId::II, ScenarioId::III}) {
    for (double rho : {-0.8, 0.0, 0.8}) {
      for (double T : {0.25, 1.0, 3.0}) {
        const PricingInputs in = scenario_inputs(id, rho, T);
        EXPECT_LT(rel(forward_price_closed(in), forward_price_quadrature(in)), 1e-10);
      }
    }
  }
}

TEST(Forward, ClosedMatchesQuadratureOnRandomParameters) {
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 300; ++i) {
    const PricingInputs in = random_inputs(gen);
    EXPECT_LT(rel(forward_price_closed(in), forward_price_quadrature(in)), 1e-10) << i;
  }
}

TEST(Forward, MatchesBruteForceExpectation) {
  for (const PricingInputs& in : {scenario_inputs(ScenarioId::I, -0.8, 1.0), asymmetric_inputs()}) {
    const double brute = t::brute_expectation(
        in, [&](double sc, double sg, double d) { return t::stack_price(in, sc, sg, d); }, 1e-9);
    EXPECT_LT(rel(forward_price_closed(in), brute), 1e-8);
  }
}

TEST(Forward, DegenerateDemandUsesConditionalMoment) {
  for (double mu : {-0.2, 0.0, 0.2, 0.5, 0.8, 1.0, 1.4}) {
    PricingInputs in = asymmetric_inputs();
    in.demand = DemandLaw{mu, 0.0, 1.0};
    const double xi = std::clamp(mu, 0.0, 1.0);
    EXPECT_NEAR(forward_price_closed(in), conditional_moment(1, xi, in), 1e-12 * 100.0) << mu;
    const double brute = t::brute_expectation(
        in, [&](double sc, double sg, double d) { return t::stack_price(in, sc, sg, d); }, 1e-9);
    EXPECT_LT(rel(forward_price_closed(in), brute), 1e-8) << mu;
  }
}

TEST(Forward, BandIntegrandsAgreeWithConditionalMoment) {
  const PricingInputs in = asymmetric_inputs();
  for (double xi : {0.05, 0.2, 0.3, 0.5, 0.7, 0.95}) {
    const DemandBand b = demand_band(in, xi);
    EXPECT_NEAR(forward_integrand(b, xi, in), conditional_moment(1, xi, in), 1e-12 * 100.0);
  }
  EXPECT_THROW(forward_integrand(DemandBand::low, 0.9, in), std::invalid_argument);
}

TEST(Forward, ArbitraryDensityQuadrature) {
  const PricingInputs in = asymmetric_inputs();
  // uniform demand on (0, 1) with no atoms
  DemandDensity uni{[](double) { return 1.0; }, 0.0, 0.0};
  const double q = forward_price_quadrature(in, uni);
  auto g = [&](double xi) { return conditional_moment(1, xi, in); };
  const double brute = t::integrate(g, 0.0, 0.3) + t::integrate(g, 0.3, 0.7) + t::integrate(g, 0.7, 1.0);
  EXPECT_NEAR(q, brute, 1e-9 * q);
  DemandDensity bad{[](double) { return 0.5; }, 0.0, 0.0};
  EXPECT_THROW(forward_price_quadrature(in, bad), std::invalid_argument);
  // the model's own density reproduces the default quadrature
  EXPECT_NEAR(forward_price_quadrature(in, truncated_gaussian_density(in.demand)),
              forward_price_quadrature(in), 1e-9 * q);
}

TEST(Forward, SymmetricUnderFuelRelabelling) {
  std::mt19937_64 gen(9);
  for (int i = 0; i < 50; ++i) {
    const PricingInputs in = random_inputs(gen);
    EXPECT_LT(rel(forward_price_closed(swap_fuels(in)), forward_price_closed(in)), 1e-12);
  }
}

TEST(Forward, IncreasingInMeanDemand) {
  PricingInputs in = scenario_inputs(ScenarioId::III, 0.3, 1.0);
  double prev = 0.0;
  for (double mu = 0.0; mu <= 1.0; mu += 0.05) {
    in.demand.mu_d = mu;
    const double f = forward_price_closed(in);
    EXPECT_GT(f, prev);
    prev = f;
  }
}

TEST(Forward, SpikeCorrectionMatchesQuadrature) {
  // Off-centre mean so the spike and negative-price terms do not cancel.
  for (double m : {5.0, 20.0, 50.0}) {
    for (double sd : {0.05, 0.1, 0.2}) {
      const double mu = 0.45;
      const DemandLaw d{mu, sd, 1.0};
      const SpikeParams sp{m, 0.6 * m};
      auto dens = [&](double x) { return t::phi((x - mu) / sd) / sd; };
      const double peak = mu + 0.6 * m * sd * sd;  // mode of the tilted density
      const double hi = std::max(1.0, peak) + 40.0 * sd;
      const double spike =
          t::integrate([&](double x) { return std::expm1(0.6 * m * (x - 1.0)) * dens(x); }, 1.0,
                       std::max(1.0, peak)) +
          t::integrate([&](double x) { return std::expm1(0.6 * m * (x - 1.0)) * dens(x); },
                       std::max(1.0, peak), hi);
      const double neg =
          t::integrate([&](double x) { return std::expm1(-m * x) * dens(x); }, mu - m * sd * sd - 40.0 * sd,
                       std::min(0.0, mu - m * sd * sd)) +
          t::integrate([&](double x) { return std::expm1(-m * x) * dens(x); },
                       std::min(0.0, mu - m * sd * sd), 0.0);
      EXPECT_NEAR(spike_forward_correction(d, sp), spike - neg,
                  1e-10 * std::max(1.0, std::abs(spike) + std::abs(neg)))
          << m << ' ' << sd;
    }
  }
}

TEST(Forward, SpikeCorrectionVanishesBySymmetry) {
  // mu_d at mid-capacity with m_s = m_n: X - cap and -X share a law.
  for (double m : {5.0, 20.0}) {
    EXPECT_NEAR(spike_forward_correction(DemandLaw{0.5, 0.1, 1.0}, SpikeParams{m, m}), 0.0, 1e-15);
  }
}

TEST(Forward, SpikeClosedMatchesQuadrature) {
  PricingInputs in = scenario_inputs(ScenarioId::I, 0.0, 1.0);
  in.spike = SpikeParams{20.0, 10.0};
  EXPECT_LT(rel(forward_price_closed(in), forward_price_quadrature(in)), 1e-9);
  PricingInputs base = in;
  base.spike.reset();
  EXPECT_NEAR(forward_price_closed(in),
              forward_price_closed(base) + spike_forward_correction(in.demand, *in.spike), 1e-10);
}

TEST(Moments, FirstMomentIsForward) {
  std::mt19937_64 gen(4);
  for (int i = 0; i < 50; ++i) {
    const PricingInputs in = random_inputs(gen);
    EXPECT_NEAR(power_moment(1, in), forward_price_closed(in), 1e-10);
  }
}

TEST(Moments, HigherMomentsMatchQuadratureOfConditionalMoments) {
  std::mt19937_64 gen(6);
  for (int i = 0; i < 100; ++i) {
    const PricingInputs in = random_inputs(gen);
    const DemandDensity dens = truncated_gaussian_density(in.demand);
    for (int n : {2, 3}) {
      auto g = [&](double xi) { return conditional_moment(n, xi, in) * dens.pdf(xi); };
      const double c1 = std::min(in.coal_bid.cap, in.gas_bid.cap);
      const double c2 = std::max(in.coal_bid.cap, in.gas_bid.cap);
      const double q = dens.p_zero * conditional_moment(n, 0.0, in) +
                       dens.p_cap * conditional_moment(n, in.demand.cap, in) +
                       t::integrate(g, 0.0, c1, 1e-13) + t::integrate(g, c1, c2, 1e-13) +
                       t::integrate(g, c2, in.demand.cap, 1e-13);
      EXPECT_LT(rel(power_moment(n, in), q), 1e-9) << i << " n=" << n;
    }
  }
}

TEST(Moments, SecondMomentMatchesBruteForce) {
  const PricingInputs in = asymmetric_inputs();
  const double brute = t::brute_expectation(
      in,
      [&](double sc, double sg, double d) {
        const double p = t::stack_price(in, sc, sg, d);
        return p * p;
      },
      1e-9);
  EXPECT_LT(rel(power_moment(2, in), brute), 1e-8);
}

TEST(Moments, VarianceNonNegative) {
  std::mt19937_64 gen(10);
  for (int i = 0; i < 200; ++i) {
    EXPECT_GE(power_variance(random_inputs(gen)), 0.0);
  }
  PricingInputs in = asymmetric_inputs();
  in.law.sigma_c = in.law.sigma_g = 0.0;
  in.demand.sigma_d = 0.0;
  EXPECT_NEAR(power_variance(in), 0.0, 1e-9);
}

TEST(Inputs, Validation) {
  PricingInputs in = asymmetric_inputs();
  in.demand.cap = 0.9;
  EXPECT_THROW(in.validate(), std::invalid_argument);
  in = asymmetric_inputs();
  in.forwards.coal = -1.0;
  EXPECT_THROW(forward_price_closed(in), std::invalid_argument);
  in = asymmetric_inputs();
  EXPECT_THROW(power_moment(0, in), std::invalid_argument);
  in.spike = SpikeParams{5.0, 5.0};
  EXPECT_THROW(forward_price_quadrature(in, truncated_gaussian_density(in.demand)), std::invalid_argument);
}
