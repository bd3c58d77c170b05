#include "bidstack/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace bidstack {

namespace {

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(tag)};
    engine_.seed(seq);
  }

  double next() {
    const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
  }

 private:
  std::mt19937_64 engine_;
};

unsigned worker_count(const SimConfig& cfg, std::uint64_t jobs) {
  unsigned t = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(jobs, 1)));
}

// Runs job(i) for i in [0, jobs) on a small pool; callers write results by index.
template <class Job>
void parallel_for(std::uint64_t jobs, unsigned threads, Job job) {
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::uint64_t i = next++; i < jobs && !failed; i = next++) {
        try {
          job(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t base_draws(const SimConfig& cfg) {
  return cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
}

struct Sampler {
  double mu_c, mu_g, a11, a21, a22, mu_d, sd_d, cap;

  Sampler(const FuelTerminalLaw& law, const DemandLaw& d)
      : mu_c(law.mu_c), mu_g(law.mu_g), a11(law.sigma_c), a21(law.rho * law.sigma_g),
        a22(law.sigma_g * std::sqrt(std::max(0.0, 1.0 - law.rho * law.rho))), mu_d(d.mu_d),
        sd_d(d.sigma_d), cap(d.cap) {}

  TerminalSample make(double z1, double z2, double z3) const {
    TerminalSample s;
    s.s_c = std::exp(mu_c + a11 * z1);
    s.s_g = std::exp(mu_g + a21 * z1 + a22 * z2);
    s.x = mu_d + sd_d * z3;
    s.d = std::clamp(s.x, 0.0, cap);
    return s;
  }
};

// Calls visit(sample, mirror_or_null) for every base draw of a chunk.
template <class Visit>
void run_chunk(const Sampler& sm, const SimConfig& cfg, std::uint64_t chunk, Visit visit) {
  const std::uint64_t total = base_draws(cfg);
  const std::uint64_t begin = chunk * kChunkSize;
  const std::uint64_t end = std::min(total, begin + kChunkSize);
  NormalStream rng(cfg.seed, chunk, 0);
  for (std::uint64_t i = begin; i < end; ++i) {
    const double z1 = rng.next();
    const double z2 = rng.next();
    const double z3 = rng.next();
    const TerminalSample a = sm.make(z1, z2, z3);
    if (cfg.antithetic) {
      const TerminalSample b = sm.make(-z1, -z2, -z3);
      visit(a, &b);
    } else {
      visit(a, nullptr);
    }
  }
}

void merge_into(MomentSummary& a, const MomentSummary& b) {
  if (b.n == 0) return;
  if (a.n == 0) {
    a = b;
    return;
  }
  const std::size_t k = a.mean.size();
  const double na = static_cast<double>(a.n);
  const double nb = static_cast<double>(b.n);
  const double n = na + nb;
  std::vector<double> delta(k);
  for (std::size_t i = 0; i < k; ++i) delta[i] = b.mean[i] - a.mean[i];
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      a.comoment[i * k + j] += b.comoment[i * k + j] + delta[i] * delta[j] * na * nb / n;
    }
  }
  for (std::size_t i = 0; i < k; ++i) a.mean[i] += delta[i] * nb / n;
  a.n += b.n;
}

// Fixed binary tree over chunk order.
MomentSummary merge_range(std::vector<MomentSummary>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  MomentSummary left = merge_range(parts, lo, mid);
  merge_into(left, merge_range(parts, mid, hi));
  return left;
}

}  // namespace

void SimConfig::validate() const {
  if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  if (antithetic && n_paths < 2) throw std::invalid_argument("antithetic sampling needs n_paths >= 2");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
}

double MomentSummary::covariance(std::size_t i, std::size_t j) const {
  if (n < 2) return 0.0;
  return comoment[i * mean.size() + j] / static_cast<double>(n - 1);
}

Estimate MomentSummary::estimate(std::size_t i) const {
  const double var = covariance(i, i);
  return {mean[i], n > 0 ? std::sqrt(std::max(0.0, var) / static_cast<double>(n)) : 0.0, n};
}

std::vector<TerminalSample> sample_terminal(const FuelTerminalLaw& law, const DemandLaw& demand,
                                            const SimConfig& cfg) {
  cfg.validate();
  law.validate();
  demand.validate();
  const Sampler sm(law, demand);
  const std::uint64_t per = cfg.antithetic ? 2 : 1;
  std::vector<TerminalSample> out(base_draws(cfg) * per);
  const std::uint64_t chunks = (base_draws(cfg) + kChunkSize - 1) / kChunkSize;
  parallel_for(chunks, worker_count(cfg, chunks), [&](std::uint64_t c) {
    std::uint64_t pos = c * kChunkSize * per;
    run_chunk(sm, cfg, c, [&](const TerminalSample& a, const TerminalSample* b) {
      out[pos++] = a;
      if (b) out[pos++] = *b;
    });
  });
  return out;
}

MomentSummary mc_summarize(const FuelTerminalLaw& law, const DemandLaw& demand,
                           const SimConfig& cfg, std::size_t k, const VectorPayoff& payoff) {
  cfg.validate();
  law.validate();
  demand.validate();
  if (k == 0) throw std::invalid_argument("payoff dimension must be >= 1");
  const Sampler sm(law, demand);
  const std::uint64_t chunks = (base_draws(cfg) + kChunkSize - 1) / kChunkSize;
  std::vector<MomentSummary> parts(chunks);
  parallel_for(chunks, worker_count(cfg, chunks), [&](std::uint64_t c) {
    MomentSummary s;
    s.mean.assign(k, 0.0);
    s.comoment.assign(k * k, 0.0);
    std::vector<double> x(k), y(k), d(k);
    run_chunk(sm, cfg, c, [&](const TerminalSample& a, const TerminalSample* b) {
      payoff(a, x.data());
      if (b) {
        payoff(*b, y.data());
        for (std::size_t i = 0; i < k; ++i) x[i] = 0.5 * (x[i] + y[i]);
      }
      ++s.n;
      const double n = static_cast<double>(s.n);
      for (std::size_t i = 0; i < k; ++i) {
        d[i] = x[i] - s.mean[i];
        s.mean[i] += d[i] / n;
      }
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) s.comoment[i * k + j] += d[i] * (x[j] - s.mean[j]);
      }
    });
    parts[c] = std::move(s);
  });
  return merge_range(parts, 0, parts.size());
}

Estimate mc_expectation(const FuelTerminalLaw& law, const DemandLaw& demand, const SimConfig& cfg,
                        const std::function<double(const TerminalSample&)>& payoff) {
  return mc_summarize(law, demand, cfg, 1,
                      [&](const TerminalSample& s, double* out) { out[0] = payoff(s); })
      .estimate(0);
}

FuelTerminalLaw sampling_law(const PricingInputs& in) {
  FuelTerminalLaw law = in.law;
  law.mu_c = std::log(in.forwards.coal) - 0.5 * law.sigma_c * law.sigma_c;
  law.mu_g = std::log(in.forwards.gas) - 0.5 * law.sigma_g * law.sigma_g;
  return law;
}

double sample_price(const PricingInputs& in, const TerminalSample& s) {
  if (in.spike) return spot_price_extended(in.coal_bid, in.gas_bid, s.x, s.s_c, s.s_g, *in.spike).price;
  return spot_price_twofuel(in.coal_bid, in.gas_bid, s.d, s.s_c, s.s_g).price;
}

Estimate mc_forward(const PricingInputs& in, const SimConfig& cfg) {
  in.validate();
  return mc_expectation(sampling_law(in), in.demand, cfg,
                        [&](const TerminalSample& s) { return sample_price(in, s); });
}

Estimate mc_spread(const PricingInputs& in, const SpreadSpec& spec, const SimConfig& cfg) {
  in.validate();
  const double df = std::exp(-in.rate * in.maturity);
  const double h = spec.heat_rate;
  const bool dark = spec.leg == SpreadLeg::dark;
  return mc_expectation(sampling_law(in), in.demand, cfg, [&](const TerminalSample& s) {
    const double cost = h * (dark ? s.s_c : s.s_g);
    return df * std::max(0.0, sample_price(in, s) - cost);
  });
}

Estimate mc_moment(int n, const PricingInputs& in, const SimConfig& cfg) {
  if (n < 1) throw std::invalid_argument("moment order must be >= 1");
  in.validate();
  PricingInputs base = in;
  base.spike.reset();
  return mc_expectation(sampling_law(in), in.demand, cfg,
                        [&](const TerminalSample& s) { return std::pow(sample_price(base, s), n); });
}

Estimate mc_power_variance(const PricingInputs& in, const SimConfig& cfg) {
  in.validate();
  PricingInputs base = in;
  base.spike.reset();
  const MomentSummary m =
      mc_summarize(sampling_law(in), in.demand, cfg, 2, [&](const TerminalSample& s, double* out) {
        const double p = sample_price(base, s);
        out[0] = p;
        out[1] = p * p;
      });
  const double m1 = m.mean[0];
  const double var = m.mean[1] - m1 * m1;
  // Gradient of m2 - m1^2 is (-2 m1, 1).
  const double gvar = 4.0 * m1 * m1 * m.covariance(0, 0) - 4.0 * m1 * m.covariance(0, 1) +
                      m.covariance(1, 1);
  return {var, std::sqrt(std::max(0.0, gvar) / static_cast<double>(m.n)), m.n};
}

std::vector<SpotPath> simulate_spot_paths(const FuelDynamics& dyn, const FuelBid& coal,
                                          const FuelBid& gas, const DemandPathSpec& demand,
                                          std::optional<SpikeParams> spike, double horizon,
                                          const SimConfig& cfg) {
  cfg.validate();
  dyn.validate();
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!(demand.kappa > 0.0) || !(demand.vol >= 0.0)) {
    throw std::invalid_argument("demand OU needs kappa > 0 and vol >= 0");
  }
  if (spike) spike->validate();

  const double dt = horizon / cfg.n_steps;
  const double ec = std::exp(-dyn.kappa_c * dt);
  const double eg = std::exp(-dyn.kappa_g * dt);
  const double ex = std::exp(-demand.kappa * dt);
  const double vc = dyn.nu_c * dyn.nu_c * -std::expm1(-2.0 * dyn.kappa_c * dt) / (2.0 * dyn.kappa_c);
  const double vg = dyn.nu_g * dyn.nu_g * -std::expm1(-2.0 * dyn.kappa_g * dt) / (2.0 * dyn.kappa_g);
  const double ks = dyn.kappa_c + dyn.kappa_g;
  const double cv = dyn.varrho * dyn.nu_c * dyn.nu_g * -std::expm1(-ks * dt) / ks;
  const double sc = std::sqrt(vc);
  const double l21 = sc > 0.0 ? cv / sc : 0.0;
  const double l22 = std::sqrt(std::max(0.0, vg - l21 * l21));
  const double sx = demand.vol * std::sqrt(-std::expm1(-2.0 * demand.kappa * dt) / (2.0 * demand.kappa));
  const double cap = coal.cap + gas.cap;

  auto seasonal = [&](double t) { return demand.seasonal ? demand.seasonal(t) : 0.0; };
  auto price = [&](double x, double s_c, double s_g) {
    if (spike) return spot_price_extended(coal, gas, x, s_c, s_g, *spike).price;
    return spot_price_twofuel(coal, gas, std::clamp(x, 0.0, cap), s_c, s_g).price;
  };

  std::vector<SpotPath> paths(cfg.n_paths);
  parallel_for(cfg.n_paths, worker_count(cfg, cfg.n_paths), [&](std::uint64_t p) {
    const std::uint64_t base = cfg.antithetic ? p / 2 : p;
    const double sign = cfg.antithetic && (p % 2 == 1) ? -1.0 : 1.0;
    NormalStream rng(cfg.seed, base, 1);
    SpotPath path;
    path.reserve(static_cast<std::size_t>(cfg.n_steps) + 1);
    double lc = std::log(dyn.s0_c);
    double lg = std::log(dyn.s0_g);
    double y = demand.x0;
    double x = y + seasonal(0.0);
    path.push_back({0.0, dyn.s0_c, dyn.s0_g, x, std::clamp(x, 0.0, cap), price(x, dyn.s0_c, dyn.s0_g)});
    for (int step = 1; step <= cfg.n_steps; ++step) {
      const double z1 = sign * rng.next();
      const double z2 = sign * rng.next();
      const double z3 = sign * rng.next();
      lc = dyn.lambda_c + (lc - dyn.lambda_c) * ec + sc * z1;
      lg = dyn.lambda_g + (lg - dyn.lambda_g) * eg + l21 * z1 + l22 * z2;
      y = demand.mean + (y - demand.mean) * ex + sx * z3;
      const double t = step * dt;
      x = y + seasonal(t);
      const double s_c = std::exp(lc);
      const double s_g = std::exp(lg);
      path.push_back({t, s_c, s_g, x, std::clamp(x, 0.0, cap), price(x, s_c, s_g)});
    }
    paths[p] = std::move(path);
  });
  return paths;
}

void write_paths_csv(std::ostream& os, const std::vector<SpotPath>& paths) {
  const auto old = os.precision();
  os << std::setprecision(17);
  os << "path,t,s_c,s_g,x,d,price\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (const auto& pt : paths[p]) {
      os << p << ',' << pt.t << ',' << pt.s_c << ',' << pt.s_g << ',' << pt.x << ',' << pt.d << ','
         << pt.price << '\n';
    }
  }
  os.precision(old);
}

}  // namespace bidstack
