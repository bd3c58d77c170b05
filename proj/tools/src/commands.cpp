#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "bidstack/plant_valuation.hpp"

namespace bidstack::cli {

using nlohmann::json;

namespace {

std::optional<SpikeParams> spike_of(const RunConfig& cfg) {
  if (cfg.spike_enabled) return cfg.spike;
  return std::nullopt;
}

std::vector<double> correlations_of(const RunConfig& cfg) {
  if (!cfg.correlations.empty()) return cfg.correlations;
  return {cfg.scenario.base.dynamics.varrho};
}

std::vector<double> heat_rates_of(const RunConfig& cfg) {
  return cfg.heat_rates.empty() ? default_heat_rates() : cfg.heat_rates;
}

ScenarioSpec with_rho(ScenarioSpec s, double rho) {
  s.base.dynamics.varrho = rho;
  return s;
}

ScenarioSpec reference_of(ScenarioSpec s) {
  s.id = ScenarioId::I;
  s.forward_inputs.reset();
  s.level_overrides.reset();
  return s;
}

struct MatchedMoments {
  double mean, variance;
};

MatchedMoments matched(const RunConfig& cfg, const ScenarioSpec& sc, double t) {
  const PricingInputs own = make_pricing_inputs(sc, t);
  const PricingInputs ref = make_pricing_inputs(reference_of(sc), t);
  return {power_moment(1, cfg.match.match_mean ? own : ref),
          power_variance(cfg.match.match_variance ? own : ref)};
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s + '\n';
}

std::string error_json(const std::string& kind, const std::string& message,
                       const std::string& path = {}) {
  json j{{"error", kind}, {"message", message}};
  if (!path.empty()) j["path"] = path;
  return j.dump();
}

}  // namespace

std::string format_number(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << x;
  return os.str();
}

std::string cmd_price_spot(const RunConfig& cfg) {
  const ModelParameters& p = cfg.scenario.base;
  SpotQuote q;
  if (cfg.spike_enabled) {
    const double x = cfg.spot.x ? *cfg.spot.x : cfg.spot.demand.value_or(p.demand.mu_d);
    q = spot_price_extended(p.coal, p.gas, x, cfg.spot.s_c, cfg.spot.s_g, cfg.spike);
  } else {
    if (cfg.spot.x) throw ConfigError("spot.x", "needs the spike extension (--spike)");
    const double d = cfg.spot.demand.value_or(p.demand.mu_d);
    q = spot_price_twofuel(p.coal, p.gas, d, cfg.spot.s_c, cfg.spot.s_g);
  }
  return "price,region\n" + csv_line({format_number(q.price), region_label(q.region)});
}

std::string cmd_price_forward(const RunConfig& cfg) {
  std::string out = "rho,T,closed,quadrature,mc,mc_se\n";
  for (double rho : correlations_of(cfg)) {
    const ScenarioSpec sc = with_rho(cfg.scenario, rho);
    for (double t : cfg.maturities) {
      const PricingInputs in = make_pricing_inputs(sc, t, spike_of(cfg));
      const Estimate mc = mc_forward(in, cfg.mc);
      out += csv_line({format_number(rho), format_number(t), format_number(forward_price_closed(in)),
                       format_number(forward_price_quadrature(in)), format_number(mc.value),
                       format_number(mc.std_error)});
    }
  }
  return out;
}

std::string cmd_price_spread(const RunConfig& cfg) {
  std::string out = "rho,T,h,stack,margrabe,cointegration,implied_corr\n";
  const bool dark = cfg.leg == SpreadLeg::dark;
  for (double rho : correlations_of(cfg)) {
    const ScenarioSpec sc = with_rho(cfg.scenario, rho);
    for (double t : cfg.maturities) {
      const PricingInputs in = make_pricing_inputs(sc, t, spike_of(cfg));
      const MatchedMoments mm = matched(cfg, sc, t);
      const LognormalPowerLaw lp = lognormal_from_moments(mm.mean, mm.variance, rho);
      const double f_i = dark ? in.forwards.coal : in.forwards.gas;
      const double s_i = dark ? in.law.sigma_c : in.law.sigma_g;
      std::optional<CointegrationSpec> coint;
      if (cfg.cointegration) {
        const auto [wc, wg] = cointegration_weights(sc.base.coal, sc.base.demand.mu_d);
        coint = match_cointegration(wc, wg, in.law, mm.mean, mm.variance);
      }
      for (double h : heat_rates_of(cfg)) {
        const double stack = spread_price_closed(in, SpreadSpec{cfg.leg, h, t});
        const double marg = margrabe_price(mm.mean, f_i, h, margrabe_sigma(lp.sigma_p, s_i, rho),
                                           in.rate, t);
        std::string co;
        if (coint) {
          co = format_number(cointegration_spread_mc(*coint, in.law, cfg.leg, h, in.rate, t,
                                                     cfg.mc.n_paths, cfg.mc.seed, cfg.mc.threads)
                                 .value);
        }
        const auto imp = implied_correlation(stack, mm.mean, f_i, h, lp.sigma_p, s_i, in.rate, t);
        out += csv_line({format_number(rho), format_number(t), format_number(h), format_number(stack),
                         format_number(marg), co, imp ? format_number(*imp) : std::string()});
      }
    }
  }
  return out;
}

PlantReport cmd_value_plant(const RunConfig& cfg, bool exact_hours) {
  PlantSpec plant;
  plant.leg = cfg.leg;
  const FuelBid& leg_bid = cfg.leg == SpreadLeg::dark ? cfg.scenario.base.coal : cfg.scenario.base.gas;
  plant.heat_rate = cfg.plant.heat_rate.value_or(median_heat_rate(leg_bid));
  plant.capacity_mw = cfg.plant.capacity_mw;
  plant.hours = hourly_maturities(cfg.plant.years);
  plant.rate = cfg.scenario.base.rate;

  SweepOptions opt;
  opt.valuation.mode = exact_hours ? ValuationMode::exact : ValuationMode::cached;
  opt.valuation.cache_step = cfg.plant.cache_step_hours / 8760.0;
  opt.cointegration = cfg.cointegration;
  opt.rho_pi = cfg.scenario.base.dynamics.varrho;
  opt.policy = cfg.match;
  opt.cointegration_paths = cfg.mc.n_paths;
  opt.seed = cfg.mc.seed;
  opt.threads = cfg.mc.threads;

  std::ostringstream os;
  os.imbue(std::locale::classic());
  write_sweep_csv(os, plant_value_sweep(plant, cfg.scenario, cfg.mu_grid, spike_of(cfg), opt));

  std::vector<double> mats = cfg.plant.crossover_maturities;
  if (mats.empty()) {
    for (double t = 0.25; t <= cfg.plant.years + 1e-12; t += 0.25) mats.push_back(t);
  }
  const bool crossover =
      !margrabe_crossovers(plant, cfg.scenario, cfg.mu_grid, mats, spike_of(cfg), opt).empty();
  return {os.str(), crossover};
}

std::string cmd_implied_corr(const RunConfig& cfg) {
  std::string out = "rho,T,h,stack,implied_corr\n";
  const bool dark = cfg.leg == SpreadLeg::dark;
  for (double rho : correlations_of(cfg)) {
    const ScenarioSpec sc = with_rho(cfg.scenario, rho);
    for (double t : cfg.maturities) {
      const PricingInputs in = make_pricing_inputs(sc, t, spike_of(cfg));
      const MatchedMoments mm = matched(cfg, sc, t);
      const LognormalPowerLaw lp = lognormal_from_moments(mm.mean, mm.variance);
      const double f_i = dark ? in.forwards.coal : in.forwards.gas;
      const double s_i = dark ? in.law.sigma_c : in.law.sigma_g;
      for (double h : heat_rates_of(cfg)) {
        const double stack = spread_price_closed(in, SpreadSpec{cfg.leg, h, t});
        const auto imp = implied_correlation(stack, mm.mean, f_i, h, lp.sigma_p, s_i, in.rate, t);
        out += csv_line({format_number(rho), format_number(t), format_number(h), format_number(stack),
                         imp ? format_number(*imp) : std::string()});
      }
    }
  }
  return out;
}

std::string cmd_simulate(const RunConfig& cfg) {
  const ModelParameters& p = cfg.scenario.base;
  DemandPathSpec d;
  d.kappa = cfg.simulate.demand_kappa;
  d.mean = p.demand.mu_d;
  d.vol = p.demand.sigma_d * std::sqrt(2.0 * d.kappa);
  d.x0 = p.demand.mu_d;
  FuelDynamics dyn = p.dynamics;
  if (cfg.scenario.level_overrides) {
    const LevelOverrides& o = *cfg.scenario.level_overrides;
    dyn.lambda_c = o.lambda_c;
    dyn.s0_c = o.s0_c;
    dyn.lambda_g = o.lambda_g;
    dyn.s0_g = o.s0_g;
  }
  if (cfg.scenario.forward_inputs) {
    throw ConfigError("scenario", "path simulation uses fuel dynamics; scenario II has no path law");
  }
  SimConfig mc = cfg.mc;
  mc.n_paths = cfg.simulate.paths;
  const auto paths = simulate_spot_paths(dyn, p.coal, p.gas, d, spike_of(cfg), cfg.simulate.horizon, mc);
  std::ostringstream os;
  os.imbue(std::locale::classic());
  write_paths_csv(os, paths);
  return os.str();
}

std::string cmd_scenario_list() {
  std::string out = "scenario,coal_forward_1y,gas_forward_1y,description\n";
  const char* desc[] = {"fuel dynamics as given",
                        "linear forward curves: coal in backwardation and gas in contango",
                        "coal levels at 7 and gas levels at 13"};
  int i = 0;
  for (ScenarioId id : {ScenarioId::I, ScenarioId::II, ScenarioId::III}) {
    const ScenarioState st = scenario_build(make_scenario(id), 1.0);
    out += csv_line({scenario_label(id), format_number(st.forwards.coal),
                     format_number(st.forwards.gas), desc[i++]});
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      std::remove(tmp.c_str());
      throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename onto '" + path + "': " + ec.message());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bid-stack electricity pricing: spot, forwards, spread options, plant values", "bidstack"};
  app.require_subcommand(1);
  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
  bool spike = false;
  bool exact_hours = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "Monte Carlo seed (overrides mc.seed)");
  app.add_option("--out", out_path, "Output CSV path (default: stdout)");
  app.add_flag("--spike", spike, "Enable the spike and negative-price extension");

  auto* spot = app.add_subcommand("price-spot", "Spot price and region for one market state");
  auto* fwd = app.add_subcommand("price-forward", "Forward price: closed form, quadrature and MC");
  auto* spread = app.add_subcommand("price-spread", "Spread options: stack, Margrabe, cointegration");
  auto* plant = app.add_subcommand("value-plant", "Plant value sweep over mean demand");
  plant->add_flag("--exact-hours", exact_hours, "Price every hour instead of a weekly grid");
  auto* imp = app.add_subcommand("implied-corr", "Margrabe implied correlation of stack prices");
  auto* sim = app.add_subcommand("simulate", "Spot price paths");
  auto* scen = app.add_subcommand("scenario", "Scenario presets");
  auto* scen_list = scen->add_subcommand("list", "List the built-in scenarios");
  scen->require_subcommand(1);
  for (auto* s : {spot, fwd, spread, plant, imp, sim, scen, scen_list}) s->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what()) << '\n';
    return 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) cfg.mc.seed = *seed;
    if (spike) cfg.spike_enabled = true;
    cfg.validate();

    std::string csv;
    json summary{{"status", "ok"}};
    if (spot->parsed()) {
      csv = cmd_price_spot(cfg);
    } else if (fwd->parsed()) {
      csv = cmd_price_forward(cfg);
    } else if (spread->parsed()) {
      csv = cmd_price_spread(cfg);
    } else if (plant->parsed()) {
      const PlantReport r = cmd_value_plant(cfg, exact_hours);
      csv = r.csv;
      summary["crossover"] = r.crossover;
    } else if (imp->parsed()) {
      csv = cmd_implied_corr(cfg);
    } else if (sim->parsed()) {
      csv = cmd_simulate(cfg);
    } else {
      csv = cmd_scenario_list();
    }
    if (out_path.empty()) {
      out << csv;
    } else {
      write_atomic(out_path, csv);
      summary["out"] = out_path;
    }
    err << summary.dump() << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << error_json("config", e.what(), e.path()) << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << error_json("validation", e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << error_json("runtime", e.what()) << '\n';
    return 1;
  }
}

}  // namespace bidstack::cli
