#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bidstack/gauss_kernel.hpp"
#include "oracles.hpp"

using namespace bidstack;
namespace t = bidstack::testing;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(NormCdf, ReferenceValues) {
  EXPECT_DOUBLE_EQ(norm_cdf(0.0), 0.5);
  EXPECT_NEAR(norm_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(norm_cdf(-1.0), 0.15865525393145705, 1e-16);
  // deep tail, relative accuracy
  EXPECT_NEAR(norm_cdf(-8.0) / 6.2209605742717841e-16, 1.0, 1e-13);
  EXPECT_EQ(norm_cdf(kInf), 1.0);
  EXPECT_EQ(norm_cdf(-kInf), 0.0);
  EXPECT_NEAR(norm_pdf(0.0), 0.3989422804014327, 1e-16);
}

TEST(NormCdf, RatioLimits) {
  EXPECT_EQ(norm_cdf_ratio(1.0, 0.0), 1.0);
  EXPECT_EQ(norm_cdf_ratio(-1.0, 0.0), 0.0);
  EXPECT_EQ(norm_cdf_ratio(0.0, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(norm_cdf_ratio(0.3, 0.5, 0.4), norm_cdf(0.3 / 0.5 + 0.4 * 0.5));
}

TEST(Binorm, IndependentCaseIsProduct) {
  for (double x : {-2.0, -0.3, 0.0, 1.1}) {
    for (double y : {-1.5, 0.2, 2.5}) {
      EXPECT_NEAR(binorm_cdf(x, y, 0.0), norm_cdf(x) * norm_cdf(y), 1e-15);
    }
  }
}

TEST(Binorm, OriginArcsineIdentity) {
  for (double r : {-0.99, -0.7, -0.2, 0.0, 0.4, 0.93, 0.999}) {
    EXPECT_NEAR(binorm_cdf(0.0, 0.0, r), 0.25 + std::asin(r) / (2.0 * t::kPi), 1e-15) << r;
  }
}

TEST(Binorm, AgreesWithOneDimensionalQuadrature) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> pos(-4.0, 4.0), cor(-0.999, 0.999);
  for (int i = 0; i < 200; ++i) {
    const double x = pos(gen), y = pos(gen), r = cor(gen);
    EXPECT_NEAR(binorm_cdf(x, y, r), t::binorm_by_quadrature(x, y, r), 2e-14)
        << x << ' ' << y << ' ' << r;
  }
}

TEST(Binorm, HighCorrelationBranch) {
  for (double r : {0.93, 0.97, 0.995, -0.93, -0.97, -0.995}) {
    for (double x : {-2.0, 0.5, 1.7}) {
      for (double y : {-1.0, 0.1, 2.2}) {
        EXPECT_NEAR(binorm_cdf(x, y, r), t::binorm_by_quadrature(x, y, r), 2e-14);
      }
    }
  }
}

TEST(Binorm, DegenerateCorrelations) {
  EXPECT_NEAR(binorm_cdf(0.3, -0.4, 1.0), norm_cdf(-0.4), 1e-16);
  EXPECT_NEAR(binorm_cdf(0.3, -0.4, -1.0), 0.0, 1e-16);
  EXPECT_NEAR(binorm_cdf(0.3, 0.4, -1.0), norm_cdf(0.3) + norm_cdf(0.4) - 1.0, 1e-15);
}

TEST(Binorm, InfiniteArguments) {
  EXPECT_NEAR(binorm_cdf(kInf, 0.7, 0.3), norm_cdf(0.7), 1e-16);
  EXPECT_NEAR(binorm_cdf(-0.2, kInf, -0.6), norm_cdf(-0.2), 1e-16);
  EXPECT_EQ(binorm_cdf(-kInf, 1.0, 0.5), 0.0);
  EXPECT_EQ(binorm_cdf(kInf, kInf, 0.5), 1.0);
}

TEST(Binorm, SymmetryAndComplement) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> pos(-3.0, 3.0), cor(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double x = pos(gen), y = pos(gen), r = cor(gen);
    EXPECT_NEAR(binorm_cdf(x, y, r), binorm_cdf(y, x, r), 1e-15);
    EXPECT_NEAR(binorm_cdf(x, y, r) + binorm_cdf(x, -y, -r), norm_cdf(x), 2e-15);
    const double v = binorm_cdf(x, y, r);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, std::min(norm_cdf(x), norm_cdf(y)) + 1e-16);
  }
}

TEST(Binorm, MonotoneInCorrelation) {
  double prev = binorm_cdf(0.4, -0.3, -1.0);
  for (double r = -0.95; r <= 1.0; r += 0.05) {
    const double v = binorm_cdf(0.4, -0.3, r);
    EXPECT_GE(v, prev - 1e-16);
    prev = v;
  }
}

TEST(Binorm, RejectsBadCorrelation) {
  EXPECT_THROW(binorm_cdf(0.0, 0.0, 1.0001), std::invalid_argument);
  EXPECT_THROW(binorm_cdf(0.0, 0.0, std::nan("")), std::invalid_argument);
  EXPECT_THROW(binorm_cdf(std::nan(""), 0.0, 0.1), std::invalid_argument);
}

TEST(BinormStrip, InclusionExclusion) {
  const std::vector<double> up{1.0, 0.2}, lo{-0.5, -2.0};
  const double expect = binorm_cdf(1.0, 0.3, 0.4) - binorm_cdf(-0.5, 0.3, 0.4) +
                        binorm_cdf(0.2, 0.3, 0.4) - binorm_cdf(-2.0, 0.3, 0.4);
  EXPECT_NEAR(binorm_strip(up, lo, 0.3, 0.4), expect, 4e-16);
  EXPECT_NEAR(binorm_strip(StripArgs{up, lo, 0.3, 0.4}), expect, 4e-16);
  EXPECT_EQ(binorm_strip(std::vector<double>{0.7}, std::vector<double>{0.7}, 0.1, 0.2), 0.0);
}

TEST(BinormStrip, RejectsMalformedRows) {
  EXPECT_THROW(binorm_strip(std::vector<double>{1.0}, std::vector<double>{}, 0.0, 0.0),
               std::invalid_argument);
  EXPECT_THROW(binorm_strip(StripArgs{{}, {}, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(binorm_strip(std::vector<double>{1.0}, std::vector<double>{0.0}, 0.0, 2.0),
               std::invalid_argument);
}

TEST(GaussianOverlap, MatchesQuadrature) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> l(-2.0, 2.0), q(-2.0, 2.0), a(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double l1 = l(gen), l2 = l(gen), q1 = q(gen), q2 = q(gen), up = a(gen);
    // tilted density exp(l1 + q1 x) phi(x) peaks at x = q1; nothing below q1 - 40 matters
    const double lo = std::min(up, q1) - 40.0;
    const double quad = t::integrate(
        [&](double x) {
          return std::exp(l1 + q1 * x - 0.5 * x * x) / std::sqrt(2.0 * t::kPi) * t::Phi(l2 + q2 * x);
        },
        lo, up, 1e-14);
    EXPECT_NEAR(gaussian_exp_overlap(l1, l2, q1, q2, up), quad, 1e-12 * std::max(1.0, quad));
  }
}

TEST(GaussianOverlap, SpecialCases) {
  // q2 = 0 reduces to a lognormal partial moment times a constant.
  const double l1 = 0.3, q1 = 0.8, a = 0.5, l2 = -0.4;
  const double expect = std::exp(l1 + 0.5 * q1 * q1) * norm_cdf(a - q1) * norm_cdf(l2);
  EXPECT_NEAR(gaussian_exp_overlap(l1, l2, q1, 0.0, a), expect, 1e-15);
  // a = +inf: full expectation E[e^{q1 X} Phi(l2 + q2 X)].
  const double full = std::exp(0.5 * q1 * q1) * norm_cdf((l2 + q1 * 1.5) / std::sqrt(1.0 + 2.25));
  EXPECT_NEAR(gaussian_exp_overlap(0.0, l2, q1, 1.5, kInf), full, 1e-15);
}
