#include "bidstack/plant_valuation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

#include "bidstack/forward_pricing.hpp"

namespace bidstack {

namespace {

ScenarioSpec with_demand(ScenarioSpec s, const DemandLaw& d, double rate) {
  s.base.demand = d;
  s.base.rate = rate;
  return s;
}

ScenarioSpec reference_of(const ScenarioSpec& s) {
  ScenarioSpec r = s;
  r.id = ScenarioId::I;
  r.forward_inputs.reset();
  r.level_overrides.reset();
  return r;
}

double hour_spread(const PlantSpec& plant, const ScenarioSpec& sc, double t,
                   std::optional<SpikeParams> spike) {
  const PricingInputs in = make_pricing_inputs(sc, t, spike);
  return spread_price_closed(in, SpreadSpec{plant.leg, plant.heat_rate, t});
}

}  // namespace

void PlantSpec::validate() const {
  if (!(capacity_mw > 0.0)) throw std::invalid_argument("plant capacity must be > 0");
  if (!(heat_rate > 0.0)) throw std::invalid_argument("heat rate must be > 0");
  if (hours.empty()) throw std::invalid_argument("plant needs at least one hour");
  if (!(hours.front() > 0.0)) throw std::invalid_argument("hour maturities must be > 0");
  for (std::size_t i = 1; i < hours.size(); ++i) {
    if (!(hours[i] > hours[i - 1])) throw std::invalid_argument("hours must be strictly increasing");
  }
  if (!std::isfinite(rate)) throw std::invalid_argument("rate must be finite");
}

std::vector<double> hourly_maturities(double years) {
  if (!(years > 0.0)) throw std::invalid_argument("plant life must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(years * 8760.0));
  std::vector<double> t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = (static_cast<double>(j) + 0.5) / 8760.0;
  return t;
}

double strip_sum(const std::vector<double>& hours, const std::function<double(double)>& per_hour,
                 const ValuationOptions& opt) {
  if (hours.empty()) return 0.0;
  double total = 0.0;
  if (opt.mode == ValuationMode::exact) {
    for (double t : hours) total += per_hour(t);
    return total;
  }
  if (!(opt.cache_step > 0.0)) throw std::invalid_argument("cache step must be > 0");
  const double t0 = hours.front();
  const double t1 = hours.back();
  const auto nodes = static_cast<std::size_t>(std::ceil((t1 - t0) / opt.cache_step)) + 1;
  std::vector<double> grid(nodes), value(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    grid[i] = i + 1 == nodes ? t1 : t0 + static_cast<double>(i) * opt.cache_step;
    value[i] = per_hour(grid[i]);
  }
  std::size_t k = 0;
  for (double t : hours) {
    while (k + 2 < nodes && grid[k + 1] < t) ++k;
    const double span = grid[k + 1 < nodes ? k + 1 : k] - grid[k];
    const double w = span > 0.0 ? (t - grid[k]) / span : 0.0;
    total += nodes == 1 ? value[0] : (1.0 - w) * value[k] + w * value[k + 1];
  }
  return total;
}

double plant_value(const PlantSpec& plant, const ScenarioSpec& scenario, const DemandLaw& demand,
                   std::optional<SpikeParams> spike, const ValuationOptions& opt) {
  plant.validate();
  const ScenarioSpec sc = with_demand(scenario, demand, plant.rate);
  return plant.capacity_mw *
         strip_sum(plant.hours, [&](double t) { return hour_spread(plant, sc, t, spike); }, opt);
}

double margrabe_hour(const PlantSpec& plant, const ScenarioSpec& scenario, const DemandLaw& demand,
                     double maturity, const SweepOptions& opt) {
  const ScenarioSpec sc = with_demand(scenario, demand, plant.rate);
  const PricingInputs own = make_pricing_inputs(sc, maturity);
  PricingInputs ref = own;
  if (!opt.policy.match_mean || !opt.policy.match_variance) {
    ref = make_pricing_inputs(reference_of(sc), maturity);
  }
  const double mean = power_moment(1, opt.policy.match_mean ? own : ref);
  const double var = power_variance(opt.policy.match_variance ? own : ref);
  const LognormalPowerLaw p = lognormal_from_moments(mean, var, opt.rho_pi);
  const bool dark = plant.leg == SpreadLeg::dark;
  const double f_i = dark ? own.forwards.coal : own.forwards.gas;
  const double s_i = dark ? own.law.sigma_c : own.law.sigma_g;
  return margrabe_price(mean, f_i, plant.heat_rate, margrabe_sigma(p.sigma_p, s_i, p.rho_pi),
                        plant.rate, maturity);
}

std::vector<SweepRow> plant_value_sweep(const PlantSpec& plant, const ScenarioSpec& scenario,
                                        const std::vector<double>& mu_grid,
                                        std::optional<SpikeParams> spike, const SweepOptions& opt) {
  plant.validate();
  if (mu_grid.empty()) throw std::invalid_argument("mu_d grid must be non-empty");
  std::vector<SweepRow> rows;
  const std::string label = scenario_label(scenario.id);
  for (double mu : mu_grid) {
    DemandLaw d = scenario.base.demand;
    d.mu_d = mu;
    rows.push_back({mu, label, "stack", plant_value(plant, scenario, d, spike, opt.valuation)});
    if (opt.margrabe) {
      const double v = plant.capacity_mw *
                       strip_sum(plant.hours,
                                 [&](double t) { return margrabe_hour(plant, scenario, d, t, opt); },
                                 opt.valuation);
      rows.push_back({mu, label, "margrabe", v});
    }
    if (opt.cointegration) {
      const ScenarioSpec sc = with_demand(scenario, d, plant.rate);
      const auto [wc, wg] = cointegration_weights(scenario.base.coal, mu);
      auto per_hour = [&](double t) {
        const PricingInputs own = make_pricing_inputs(sc, t);
        PricingInputs ref = own;
        if (!opt.policy.match_mean || !opt.policy.match_variance) {
          ref = make_pricing_inputs(reference_of(sc), t);
        }
        const double mean = power_moment(1, opt.policy.match_mean ? own : ref);
        const double var = power_variance(opt.policy.match_variance ? own : ref);
        const CointegrationSpec cs = match_cointegration(wc, wg, own.law, mean, var);
        return cointegration_spread_mc(cs, own.law, plant.leg, plant.heat_rate, plant.rate, t,
                                       opt.cointegration_paths, opt.seed, opt.threads)
            .value;
      };
      ValuationOptions coarse{ValuationMode::cached, opt.cointegration_step};
      rows.push_back({mu, label, "cointegration",
                      plant.capacity_mw * strip_sum(plant.hours, per_hour, coarse)});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  const auto old = os.precision();
  os << std::setprecision(17) << "mu_d,scenario,model,value\n";
  for (const auto& r : rows) os << r.mu_d << ',' << r.scenario << ',' << r.model << ',' << r.value << '\n';
  os.precision(old);
}

std::vector<Crossover> margrabe_crossovers(const PlantSpec& plant, const ScenarioSpec& scenario,
                                           const std::vector<double>& mu_grid,
                                           const std::vector<double>& maturities,
                                           std::optional<SpikeParams> spike, const SweepOptions& opt) {
  std::vector<Crossover> out;
  for (double mu : mu_grid) {
    DemandLaw d = scenario.base.demand;
    d.mu_d = mu;
    const ScenarioSpec sc = with_demand(scenario, d, plant.rate);
    for (double t : maturities) {
      const double s = hour_spread(plant, sc, t, spike);
      const double m = margrabe_hour(plant, scenario, d, t, opt);
      if (m < s) out.push_back({t, mu, s, m});
    }
  }
  return out;
}

}  // namespace bidstack
