#include "bidstack/gauss_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bidstack {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Half of the symmetric Gauss-Legendre rules on [-1, 1] with 6, 12 and 20
// points (negative nodes only).
constexpr std::array<double, 3> kW6 = {0.1713244923791705, 0.3607615730481384,
                                       0.4679139345726904};
constexpr std::array<double, 3> kX6 = {-0.9324695142031522, -0.6612093864662647,
                                       -0.2386191860831970};
constexpr std::array<double, 6> kW12 = {0.04717533638651177, 0.1069393259953183,
                                        0.1600783285433464,  0.2031674267230659,
                                        0.2334925365383547,  0.2491470458134029};
constexpr std::array<double, 6> kX12 = {-0.9815606342467191, -0.9041172563704750,
                                        -0.7699026741943050, -0.5873179542866171,
                                        -0.3678314989981802, -0.1252334085114692};
constexpr std::array<double, 10> kW20 = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
    0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
    0.1491729864726037,  0.1527533871307259};
constexpr std::array<double, 10> kX20 = {
    -0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188,
    -0.7463319064601508, -0.6360536807265150, -0.5108670019508271, -0.3737060887154196,
    -0.2277858511416451, -0.07652652113349733};

// Upper orthant P(X > h, Y > k) for finite h, k and |r| < 1.
double bvn_upper(double h, double k, double r) {
  std::span<const double> w;
  std::span<const double> x;
  const double ar = std::abs(r);
  if (ar < 0.3) {
    w = kW6;
    x = kX6;
  } else if (ar < 0.75) {
    w = kW12;
    x = kX12;
  } else {
    w = kW20;
    x = kX20;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (ar < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (std::size_t i = 0; i < w.size(); ++i) {
      double sn = std::sin(asr * (x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * kTwoPi) + norm_cdf(-h) * norm_cdf(-k);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  const double as = (1.0 - r) * (1.0 + r);
  double a = std::sqrt(as);
  const double bs = (h - k) * (h - k);
  const double c = (4.0 - hk) / 8.0;
  const double d = (12.0 - hk) / 16.0;
  bvn = a * std::exp(-(bs / as + hk) / 2.0) *
        (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
  if (hk > -160.0) {
    const double b = std::sqrt(bs);
    bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * norm_cdf(-b / a) * b *
           (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
  }
  a /= 2.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double xs = a * (x[i] + 1.0);
    xs *= xs;
    double rs = std::sqrt(1.0 - xs);
    bvn += a * w[i] *
           (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
            std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
    xs = as * (1.0 - x[i]) * (1.0 - x[i]) / 4.0;
    rs = std::sqrt(1.0 - xs);
    bvn += a * w[i] * std::exp(-(bs / xs + hk) / 2.0) *
           (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
            (1.0 + c * xs * (1.0 + d * xs)));
  }
  bvn = -bvn / kTwoPi;
  if (r > 0.0) return bvn + norm_cdf(-std::max(h, k));
  return -bvn + std::max(0.0, norm_cdf(-h) - norm_cdf(-k));
}

}  // namespace

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
}

double norm_cdf(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double norm_cdf_ratio(double num, double sd, double shift) {
  if (sd > 0.0) return norm_cdf(num / sd + shift * sd);
  if (num > 0.0) return 1.0;
  if (num < 0.0) return 0.0;
  return 0.5;
}

double binorm_cdf(double x, double y, double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) {
    throw std::invalid_argument("binorm_cdf: correlation must lie in [-1, 1]");
  }
  if (std::isnan(x) || std::isnan(y)) {
    throw std::invalid_argument("binorm_cdf: NaN argument");
  }
  if (x == -std::numeric_limits<double>::infinity() ||
      y == -std::numeric_limits<double>::infinity()) {
    return 0.0;
  }
  if (std::isinf(x)) return norm_cdf(y);
  if (std::isinf(y)) return norm_cdf(x);
  if (rho > 1.0 - 1e-12) return norm_cdf(std::min(x, y));
  if (rho < -1.0 + 1e-12) return std::max(0.0, norm_cdf(x) + norm_cdf(y) - 1.0);
  const double p = bvn_upper(-x, -y, rho);
  return std::clamp(p, 0.0, 1.0);
}

double binorm_strip(std::span<const double> upper, std::span<const double> lower,
                    double y, double rho) {
  if (upper.empty() || upper.size() != lower.size()) {
    throw std::invalid_argument("binorm_strip: row lists must be non-empty and of equal length");
  }
  if (!(rho >= -1.0 && rho <= 1.0)) {
    throw std::invalid_argument("binorm_strip: correlation must lie in [-1, 1]");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (upper[i] == lower[i]) continue;
    total += binorm_cdf(upper[i], y, rho) - binorm_cdf(lower[i], y, rho);
  }
  return total;
}

double binorm_strip(const StripArgs& args) {
  return binorm_strip(args.upper_rows, args.lower_rows, args.second_arg, args.correlation);
}

double gaussian_exp_overlap(double l1, double l2, double q1, double q2, double a) {
  const double s = std::sqrt(1.0 + q2 * q2);
  return std::exp(l1 + 0.5 * q1 * q1) * binorm_cdf(a - q1, (l2 + q1 * q2) / s, -q2 / s);
}

}  // namespace bidstack
