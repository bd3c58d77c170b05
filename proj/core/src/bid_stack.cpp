#include "bidstack/bid_stack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bidstack {

namespace {

void check_price(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("fuel prices must be positive and finite");
  }
}

double total_cap(std::span<const FuelBid> bids) {
  double t = 0.0;
  for (const auto& b : bids) t += b.cap;
  return t;
}

void check_snapshot(std::span<const FuelBid> bids, const MarketSnapshot& snap) {
  if (bids.empty()) throw std::invalid_argument("bid list is empty");
  if (snap.fuel_prices.size() != bids.size()) {
    throw std::invalid_argument("one fuel price per bid is required");
  }
  for (const auto& b : bids) b.validate();
  for (double s : snap.fuel_prices) check_price(s);
  if (!(snap.demand >= 0.0) || snap.demand > total_cap(bids)) {
    throw std::invalid_argument("demand must lie in [0, total capacity]");
  }
}

struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> active;
  double saturated_cap = 0.0;
};

// Breakpoint segment whose supply range contains the demand (D > 0).
Segment locate_segment(std::span<const FuelBid> bids, const MarketSnapshot& snap) {
  const std::size_t n = bids.size();
  std::vector<double> lo(n), hi(n), points;
  points.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = bids[i].floor_price(snap.fuel_prices[i]);
    hi[i] = bids[i].top_price(snap.fuel_prices[i]);
    points.push_back(lo[i]);
    points.push_back(hi[i]);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  auto supply = [&](double p) {
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q += bid_curve_inverse(bids[i], p, snap.fuel_prices[i]);
    return q;
  };

  std::size_t j = 1;
  while (j + 1 < points.size() && supply(points[j]) < snap.demand) ++j;

  Segment seg;
  seg.lo = points[j - 1];
  seg.hi = points[j];
  for (std::size_t i = 0; i < n; ++i) {
    if (lo[i] <= seg.lo && hi[i] >= seg.hi) {
      seg.active.push_back(i);
    } else if (hi[i] <= seg.lo) {
      seg.saturated_cap += bids[i].cap;
    }
  }
  return seg;
}

}  // namespace

void FuelBid::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("bid slope m must be positive");
  if (!(cap > 0.0) || !std::isfinite(cap)) throw std::invalid_argument("bid capacity must be positive");
  if (!std::isfinite(k)) throw std::invalid_argument("bid level k must be finite");
}

double FuelBid::floor_price(double fuel_price) const { return fuel_price * std::exp(k); }

double FuelBid::top_price(double fuel_price) const { return fuel_price * std::exp(k + m * cap); }

void SpikeParams::validate() const {
  if (!(m_n > 0.0) || !(m_s > 0.0)) throw std::invalid_argument("spike slopes must be positive");
}

double bid_curve_eval(const FuelBid& bid, double quantity, double fuel_price) {
  if (!(quantity >= 0.0 && quantity <= bid.cap)) {
    throw std::invalid_argument("bid_curve_eval: quantity outside [0, cap]");
  }
  return fuel_price * std::exp(bid.k + bid.m * quantity);
}

double bid_curve_inverse(const FuelBid& bid, double price, double fuel_price) {
  check_price(fuel_price);
  if (price < bid.floor_price(fuel_price)) return 0.0;
  if (price >= bid.top_price(fuel_price)) return bid.cap;
  return std::clamp((std::log(price / fuel_price) - bid.k) / bid.m, 0.0, bid.cap);
}

StackCoefficients stack_coefficients(std::span<const FuelBid> marginal) {
  if (marginal.empty()) throw std::invalid_argument("stack_coefficients: empty marginal set");
  const std::size_t n = marginal.size();
  // prod_{j != i} m_j, without division so tiny slopes stay exact.
  std::vector<double> others(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others[i] *= marginal[j].m;
    }
  }
  StackCoefficients c;
  double all = 1.0;
  for (const auto& b : marginal) all *= b.m;
  for (double o : others) c.zeta += o;
  c.alpha.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.alpha[i] = others[i] / c.zeta;
    c.beta += marginal[i].k * others[i];
  }
  c.beta /= c.zeta;
  c.gamma = all / c.zeta;
  return c;
}

MarginalSets classify_marginal_sets(std::span<const FuelBid> bids, const MarketSnapshot& snap) {
  check_snapshot(bids, snap);
  MarginalSets sets;
  if (snap.demand == 0.0) return sets;
  const double p = spot_price_nfuel(bids, snap);
  for (std::size_t i = 0; i < bids.size(); ++i) {
    const double s = snap.fuel_prices[i];
    if (bids[i].top_price(s) <= p) {
      sets.saturated.push_back(i);
    } else if (bids[i].floor_price(s) < p) {
      sets.marginal.push_back(i);
    }
  }
  return sets;
}

double spot_price_nfuel(std::span<const FuelBid> bids, const MarketSnapshot& snap) {
  check_snapshot(bids, snap);
  if (snap.demand == 0.0) {
    double p = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < bids.size(); ++i) {
      p = std::min(p, bids[i].floor_price(snap.fuel_prices[i]));
    }
    return p;
  }
  const Segment seg = locate_segment(bids, snap);
  std::vector<FuelBid> active;
  active.reserve(seg.active.size());
  for (std::size_t i : seg.active) active.push_back(bids[i]);
  const StackCoefficients c = stack_coefficients(active);
  double log_p = c.beta + c.gamma * (snap.demand - seg.saturated_cap);
  for (std::size_t a = 0; a < seg.active.size(); ++a) {
    log_p += c.alpha[a] * std::log(snap.fuel_prices[seg.active[a]]);
  }
  return std::clamp(std::exp(log_p), seg.lo, seg.hi);
}

const char* region_label(PriceRegion r) {
  switch (r) {
    case PriceRegion::floor: return "floor";
    case PriceRegion::coal_only: return "P1";
    case PriceRegion::gas_only: return "P2";
    case PriceRegion::coal_marginal: return "P3";
    case PriceRegion::gas_marginal: return "P4";
    case PriceRegion::joint: return "P5";
    case PriceRegion::negative: return "negative";
    case PriceRegion::spike: return "spike";
  }
  return "unknown";
}

TwoFuelCoefficients two_fuel_coefficients(const FuelBid& coal, const FuelBid& gas) {
  const double sum = coal.m + gas.m;
  return {gas.m / sum, coal.m / sum, (coal.k * gas.m + gas.k * coal.m) / sum,
          coal.m * gas.m / sum};
}

double joint_bid(const FuelBid& coal, const FuelBid& gas, double xi, double s_c, double s_g) {
  const auto c = two_fuel_coefficients(coal, gas);
  return std::exp(c.alpha_c * std::log(s_c) + c.alpha_g * std::log(s_g) + c.beta + c.gamma * xi);
}

SpotQuote spot_price_twofuel(const FuelBid& coal, const FuelBid& gas, double demand, double s_c,
                             double s_g) {
  coal.validate();
  gas.validate();
  check_price(s_c);
  check_price(s_g);
  const double cap = coal.cap + gas.cap;
  if (!(demand >= 0.0) || demand > cap) {
    throw std::invalid_argument("demand must lie in [0, total capacity]");
  }
  const double lo_c = coal.floor_price(s_c);
  const double lo_g = gas.floor_price(s_g);
  const double hi_c = coal.top_price(s_c);
  const double hi_g = gas.top_price(s_g);
  auto bc = [&](double q) { return s_c * std::exp(coal.k + coal.m * q); };
  auto bg = [&](double q) { return s_g * std::exp(gas.k + gas.m * q); };
  const SpotQuote joint{joint_bid(coal, gas, demand, s_c, s_g), PriceRegion::joint};

  if (demand == 0.0) return {std::min(lo_c, lo_g), PriceRegion::floor};

  // Smaller capacity is i_-; a tie makes coal i_- and leaves the mid band empty.
  const bool coal_minus = coal.cap <= gas.cap;
  const double cap_minus = coal_minus ? coal.cap : gas.cap;
  const double cap_plus = coal_minus ? gas.cap : coal.cap;

  if (demand <= cap_minus) {
    const double pc = bc(demand);
    if (pc <= lo_g) return {pc, PriceRegion::coal_only};
    const double pg = bg(demand);
    if (pg <= lo_c) return {pg, PriceRegion::gas_only};
    return joint;
  }
  if (demand <= cap_plus) {
    if (coal_minus) {
      const double pg = bg(demand);
      if (pg <= lo_c) return {pg, PriceRegion::gas_only};
      const double pgs = bg(demand - coal.cap);
      if (pgs > hi_c) return {pgs, PriceRegion::gas_marginal};
      return joint;
    }
    const double pc = bc(demand);
    if (pc <= lo_g) return {pc, PriceRegion::coal_only};
    const double pcs = bc(demand - gas.cap);
    if (pcs > hi_g) return {pcs, PriceRegion::coal_marginal};
    return joint;
  }
  const double pcs = bc(demand - gas.cap);
  if (pcs > hi_g) return {pcs, PriceRegion::coal_marginal};
  const double pgs = bg(demand - coal.cap);
  if (pgs > hi_c) return {pgs, PriceRegion::gas_marginal};
  return joint;
}

SpotQuote spot_price_extended(const FuelBid& coal, const FuelBid& gas, double x, double s_c,
                              double s_g, const SpikeParams& spike) {
  spike.validate();
  const double cap = coal.cap + gas.cap;
  if (x <= 0.0) {
    const SpotQuote base = spot_price_twofuel(coal, gas, 0.0, s_c, s_g);
    return {base.price - std::exp(-spike.m_n * x) + 1.0,
            x < 0.0 ? PriceRegion::negative : base.region};
  }
  if (x >= cap) {
    const SpotQuote base = spot_price_twofuel(coal, gas, cap, s_c, s_g);
    return {base.price + std::exp(spike.m_s * (x - cap)) - 1.0,
            x > cap ? PriceRegion::spike : base.region};
  }
  return spot_price_twofuel(coal, gas, x, s_c, s_g);
}

std::uint64_t case_count(int n) {
  if (n < 1) throw std::invalid_argument("case_count: n must be at least 1");
  if (n > 40) throw std::invalid_argument("case_count: n too large for 64-bit result");
  // sum_i C(n, i) * 2^(n - i): choose the marginal set, then any subset of the rest saturated.
  std::uint64_t total = 0;
  std::uint64_t binom = 1;
  for (int i = 1; i <= n; ++i) {
    binom = binom * static_cast<std::uint64_t>(n - i + 1) / static_cast<std::uint64_t>(i);
    total += binom << (n - i);
  }
  return total;
}

}  // namespace bidstack
