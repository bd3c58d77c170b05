#include "bidstack/market_models.hpp"

#include <cmath>
#include <stdexcept>

#include "bidstack/gauss_kernel.hpp"

namespace bidstack {

void FuelTerminalLaw::validate() const {
  if (!(sigma_c >= 0.0) || !(sigma_g >= 0.0)) throw std::invalid_argument("fuel vols must be >= 0");
  if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("fuel correlation outside [-1, 1]");
  if (!std::isfinite(mu_c) || !std::isfinite(mu_g)) throw std::invalid_argument("fuel log means must be finite");
}

double FuelTerminalLaw::spread_vol() const {
  const double v = sigma_c * sigma_c - 2.0 * rho * sigma_c * sigma_g + sigma_g * sigma_g;
  return std::sqrt(std::max(v, 0.0));
}

void FuelDynamics::validate() const {
  if (!(kappa_c > 0.0) || !(kappa_g > 0.0)) throw std::invalid_argument("mean reversion speeds must be > 0");
  if (!(nu_c >= 0.0) || !(nu_g >= 0.0)) throw std::invalid_argument("fuel log-vols must be >= 0");
  if (!(s0_c > 0.0) || !(s0_g > 0.0)) throw std::invalid_argument("spot fuel prices must be > 0");
  if (!(varrho >= -1.0 && varrho <= 1.0)) throw std::invalid_argument("noise correlation outside [-1, 1]");
}

void DemandLaw::validate() const {
  if (!(sigma_d >= 0.0) || !std::isfinite(sigma_d)) throw std::invalid_argument("demand vol must be >= 0");
  if (!(cap > 0.0)) throw std::invalid_argument("demand cap must be > 0");
  if (!std::isfinite(mu_d)) throw std::invalid_argument("demand mean must be finite");
}

FuelTerminalLaw terminal_law_from_dynamics(const FuelDynamics& dyn, double maturity) {
  dyn.validate();
  if (!(maturity > 0.0)) throw std::invalid_argument("maturity must be > 0");
  const double T = maturity;
  auto mean = [T](double kappa, double lambda, double s0) {
    const double e = std::exp(-kappa * T);
    return std::log(s0) * e + lambda * (1.0 - e);
  };
  auto var = [T](double kappa, double nu) { return nu * nu * -std::expm1(-2.0 * kappa * T) / (2.0 * kappa); };

  FuelTerminalLaw law;
  law.mu_c = mean(dyn.kappa_c, dyn.lambda_c, dyn.s0_c);
  law.mu_g = mean(dyn.kappa_g, dyn.lambda_g, dyn.s0_g);
  law.sigma_c = std::sqrt(var(dyn.kappa_c, dyn.nu_c));
  law.sigma_g = std::sqrt(var(dyn.kappa_g, dyn.nu_g));
  const double ks = dyn.kappa_c + dyn.kappa_g;
  const double cov = dyn.varrho * dyn.nu_c * dyn.nu_g * -std::expm1(-ks * T) / ks;
  const double denom = law.sigma_c * law.sigma_g;
  law.rho = denom > 0.0 ? std::clamp(cov / denom, -1.0, 1.0) : 0.0;
  return law;
}

double fuel_forward(const FuelTerminalLaw& law, Fuel fuel) {
  return fuel == Fuel::coal ? std::exp(law.mu_c + 0.5 * law.sigma_c * law.sigma_c)
                            : std::exp(law.mu_g + 0.5 * law.sigma_g * law.sigma_g);
}

FuelTerminalLaw calibrate_mean_to_forward(const FuelTerminalLaw& law, Fuel fuel,
                                          double observed_forward) {
  if (!(observed_forward > 0.0)) throw std::invalid_argument("observed forward must be > 0");
  FuelTerminalLaw out = law;
  if (fuel == Fuel::coal) {
    out.mu_c = std::log(observed_forward) - 0.5 * law.sigma_c * law.sigma_c;
  } else {
    out.mu_g = std::log(observed_forward) - 0.5 * law.sigma_g * law.sigma_g;
  }
  return out;
}

DemandAtoms demand_atoms(const DemandLaw& d) {
  d.validate();
  if (d.sigma_d == 0.0) {
    return {d.mu_d <= 0.0 ? 1.0 : 0.0, d.mu_d >= d.cap ? 1.0 : 0.0};
  }
  return {norm_cdf(-d.mu_d / d.sigma_d), norm_cdf((d.mu_d - d.cap) / d.sigma_d)};
}

const char* scenario_label(ScenarioId id) {
  switch (id) {
    case ScenarioId::I: return "I";
    case ScenarioId::II: return "II";
    case ScenarioId::III: return "III";
  }
  return "?";
}

ScenarioId parse_scenario(const std::string& s) {
  if (s == "I" || s == "1") return ScenarioId::I;
  if (s == "II" || s == "2") return ScenarioId::II;
  if (s == "III" || s == "3") return ScenarioId::III;
  throw std::invalid_argument("unknown scenario '" + s + "' (expected I, II or III)");
}

FuelForwards LinearForwardCurves::at(double maturity) const {
  const double months = 12.0 * maturity;
  return {coal_level + coal_step_per_month * months, gas_level + gas_step_per_month * months};
}

void ScenarioSpec::validate() const {
  base.coal.validate();
  base.gas.validate();
  base.dynamics.validate();
  base.demand.validate();
  if (id == ScenarioId::II && !forward_inputs) throw std::invalid_argument("scenario II needs forward curves");
  if (id == ScenarioId::III && !level_overrides) throw std::invalid_argument("scenario III needs level overrides");
  if (id == ScenarioId::I && (forward_inputs || level_overrides)) {
    throw std::invalid_argument("scenario I takes no forward curves or level overrides");
  }
}

ScenarioSpec make_scenario(ScenarioId id, const ModelParameters& base) {
  ScenarioSpec spec;
  spec.id = id;
  spec.base = base;
  if (id == ScenarioId::II) spec.forward_inputs = LinearForwardCurves{};
  if (id == ScenarioId::III) spec.level_overrides = LevelOverrides{std::log(7.0), 7.0, std::log(13.0), 13.0};
  return spec;
}

ScenarioState scenario_build(const ScenarioSpec& spec, double maturity) {
  spec.validate();
  FuelDynamics dyn = spec.base.dynamics;
  if (spec.level_overrides) {
    dyn.lambda_c = spec.level_overrides->lambda_c;
    dyn.s0_c = spec.level_overrides->s0_c;
    dyn.lambda_g = spec.level_overrides->lambda_g;
    dyn.s0_g = spec.level_overrides->s0_g;
  }
  ScenarioState st;
  st.law = terminal_law_from_dynamics(dyn, maturity);
  st.demand = spec.base.demand;
  if (spec.forward_inputs) {
    const FuelForwards f = spec.forward_inputs->at(maturity);
    if (!(f.coal > 0.0) || !(f.gas > 0.0)) {
      throw std::invalid_argument("forward curve is non-positive at this maturity");
    }
    st.law = calibrate_mean_to_forward(st.law, Fuel::coal, f.coal);
    st.law = calibrate_mean_to_forward(st.law, Fuel::gas, f.gas);
    st.forwards = f;
  } else {
    st.forwards = {fuel_forward(st.law, Fuel::coal), fuel_forward(st.law, Fuel::gas)};
  }
  return st;
}

}  // namespace bidstack
