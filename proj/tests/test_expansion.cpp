#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "onebit/errors.hpp"
#include "onebit/expansion.hpp"
#include "oracles.hpp"

using namespace onebit::expansion;
using onebit::gaussmath::ccdf2_exact;
using onebit::gaussmath::ccdf3_exact;
using onebit::gaussmath::Corr2;
using onebit::gaussmath::Corr3;
using onebit::gaussmath::kPi;

namespace {

const double kRho = 2.0 / kPi;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);

// Random valid Corr3 with det >= min_det.
Corr3 random_corr3(std::mt19937_64& rng, double max_rho, double min_det) {
  std::uniform_real_distribution<double> u(-max_rho, max_rho);
  for (;;) {
    const double a = u(rng), b = u(rng), c = u(rng);
    if (1 - a * a - b * b - c * c + 2 * a * b * c >= min_det) return Corr3(a, b, c);
  }
}

}  // namespace

TEST(ExpandCcdf2, ZeroScaleIsOrthant) {
  for (double r : {-0.7, 0.0, 0.4}) {
    const auto e = expand_ccdf2(Corr2(r), {0.0, 3.0, -2.0, {}});
    EXPECT_EQ(e.approx, onebit::gaussmath::orthant2(Corr2(r)));
    EXPECT_EQ(e.linear, 0.0);
    EXPECT_EQ(e.envelope, 0.0);
  }
}

TEST(ExpandCcdf2, IndependentUnitOffsets) {
  const auto e = expand_ccdf2(Corr2(0.0), {0.1, 1.0, 1.0, {}});
  EXPECT_NEAR(e.approx, 0.25 + 0.1 * kInvSqrt2Pi, 1e-15);
  EXPECT_NEAR(e.approx, 0.289894228040143268, 1e-15);
  EXPECT_EQ(e.approx, e.base + e.linear);
  const double m = 1.0 - oracle::q(0.1);
  const double truth = m * m;  // 0.291414093899...
  const double diff = std::abs(truth - e.approx);
  EXPECT_NEAR(diff, 1.51986585905e-3, 1e-12);
  EXPECT_LE(diff, e.envelope);
}

TEST(ExpandCcdf2, OppositeOffsetsCancelLinearTerm) {
  const Corr2 c(0.5);
  const auto e = expand_ccdf2(c, {0.2, 1.0, -1.0, {}});
  EXPECT_EQ(e.linear, 0.0);
  EXPECT_LE(std::abs(ccdf2_exact(c, 0.2, -0.2) - onebit::gaussmath::orthant2(c)), e.envelope);
}

TEST(ExpandCcdf2, RejectsGammaAndBadScale) {
  EXPECT_THROW(expand_ccdf2(Corr2(0.1), {0.1, 1.0, 1.0, 1.0}), onebit::DomainError);
  EXPECT_THROW(expand_ccdf2(Corr2(0.1), {-0.1, 1.0, 1.0, {}}), onebit::DomainError);
  EXPECT_THROW(expand_ccdf2(Corr2(0.1), {0.1, NAN, 1.0, {}}), onebit::DomainError);
}

TEST(Eta2, Examples) {
  EXPECT_EQ(eta2_envelope(Corr2(0.7), {0.4, 0.0, 0.0, {}}), 0.0);
  EXPECT_GE(eta2_envelope(Corr2(0.5), {0.3, 1.0, 2.0, {}}), eta2_envelope(Corr2(0.5), {0.2, 1.0, 2.0, {}}));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const Corr2 c(0.45 * u(rng));
    const double A = 0.25 * (u(rng) + 2.0), a = u(rng), b = u(rng);
    EXPECT_EQ(eta2_envelope(c, {A, a, b, {}}), eta2_envelope(c, {A, -a, -b, {}}));
    EXPECT_EQ(eta2_envelope(c, {A, a, b, {}}), eta2_envelope(c, {A, -a, b, {}}));
  }
}

TEST(Eta2, MonotoneOnGrid) {
  for (double r : {-0.9, -0.2, 0.0, 0.5, 0.95}) {
    const Corr2 c(r);
    for (double A = 0.0; A <= 0.5; A += 0.1) {
      for (double a = 0.0; a <= 2.0; a += 0.25) {
        for (double b = 0.0; b <= 2.0; b += 0.25) {
          const double v = eta2_envelope(c, {A, a, b, {}});
          EXPECT_LE(v, eta2_envelope(c, {A + 0.05, a, b, {}}));
          EXPECT_LE(v, eta2_envelope(c, {A, a + 0.1, b, {}}));
          EXPECT_LE(v, eta2_envelope(c, {A, a, b + 0.1, {}}));
        }
      }
    }
  }
}

TEST(ExpandCcdf3, ZeroScaleIsOrthant) {
  const auto e = expand_ccdf3(Corr3::double_rate(), {0.0, 1.0, 2.0, 3.0});
  EXPECT_NEAR(e.approx, 0.234833954855028321, 1e-15);
  EXPECT_EQ(e.envelope, 0.0);
}

TEST(ExpandCcdf3, DoubleRateSymmetricOffsets) {
  const double P = 3e-4;
  const double a = 0.7, b = 0.95;
  const auto e = expand_ccdf3(Corr3::double_rate(), {std::sqrt(P), a, b, a});
  const double expected =
      std::sqrt(P / (2 * kPi)) * ((2 * a + b) / 4 + a / kPi * std::asin(kRho / std::sqrt(1 - kRho * kRho)) -
                                  b / (2 * kPi) * std::asin(kRho * kRho / (1 - kRho * kRho)));
  EXPECT_NEAR(e.linear, expected, 1e-16);
}

TEST(ExpandCcdf3, IndependentUnitOffsets) {
  const auto e = expand_ccdf3(Corr3(0, 0, 0), {0.1, 1.0, 1.0, 1.0});
  EXPECT_NEAR(e.linear, 0.1 * kInvSqrt2Pi * 0.75, 1e-16);
  EXPECT_NEAR(e.linear, 0.0299206710301074, 1e-13);
  const double m = 1.0 - oracle::q(0.1);
  EXPECT_LE(std::abs(m * m * m - e.approx), e.envelope);
}

TEST(ExpandCcdf3, RequiresGamma) {
  EXPECT_THROW(expand_ccdf3(Corr3(0, 0, 0), {0.1, 1.0, 1.0, {}}), onebit::DomainError);
}

TEST(PartialCorrelations, KnownValues) {
  const auto p = partial_correlations(Corr3::double_rate());
  EXPECT_NEAR(p[0], kRho / std::sqrt(1 - kRho * kRho), 1e-15);
  EXPECT_NEAR(p[1], -kRho * kRho / (1 - kRho * kRho), 1e-15);
  EXPECT_NEAR(p[2], kRho / std::sqrt(1 - kRho * kRho), 1e-15);
  const auto z = partial_correlations(Corr3(0.3, 0.0, 0.0));
  EXPECT_DOUBLE_EQ(z[2], 0.3 / 1.0);
}

TEST(Eta3, Examples) {
  const Corr3 k = Corr3::double_rate();
  EXPECT_EQ(eta3_envelope(k, {0.3, 0.0, 0.0, 0.0}), 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const Corr3 c = random_corr3(rng, 0.9, 1e-3);
    const double A = 0.25 * (u(rng) + 2.0), a = u(rng), b = u(rng), g = u(rng);
    const double base = eta3_envelope(c, {A, a, b, g});
    for (int s = 1; s < 8; ++s) {
      const double sa = s & 4 ? -a : a, sb = s & 2 ? -b : b, sg = s & 1 ? -g : g;
      EXPECT_EQ(base, eta3_envelope(c, {A, sa, sb, sg}));
    }
    EXPECT_LE(base, eta3_envelope(c, {2 * A, a, b, g}));
  }
}

TEST(Eta3, MonotoneOnGrid) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 10; ++i) {
    const Corr3 c = random_corr3(rng, 0.95, 1e-3);
    for (double A = 0.0; A <= 0.5; A += 0.125) {
      for (double a = 0.0; a <= 2.0; a += 0.5) {
        for (double b = 0.0; b <= 2.0; b += 0.5) {
          for (double g = 0.0; g <= 2.0; g += 0.5) {
            const double v = eta3_envelope(c, {A, a, b, g});
            EXPECT_LE(v, eta3_envelope(c, {A + 0.05, a, b, g}));
            EXPECT_LE(v, eta3_envelope(c, {A, a + 0.1, b, g}));
            EXPECT_LE(v, eta3_envelope(c, {A, a, b + 0.1, g}));
            EXPECT_LE(v, eta3_envelope(c, {A, a, b, g + 0.1}));
          }
        }
      }
    }
  }
}

TEST(RemainderSoundness, Bivariate) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const Corr2 c(0.95 * u(rng));
    const double A = 0.25 * (u(rng) + 1.0), a = 2 * u(rng), b = 2 * u(rng);
    const auto e = expand_ccdf2(c, {A, a, b, {}});
    if (std::abs(ccdf2_exact(c, a * A, b * A) - e.approx) > e.envelope + 1e-9) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(RemainderSoundness, Trivariate) {
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const Corr3 c = random_corr3(rng, 0.95, 1e-3);
    const double A = 0.25 * (u(rng) + 1.0), a = 2 * u(rng), b = 2 * u(rng), g = 2 * u(rng);
    const auto e = expand_ccdf3(c, {A, a, b, g});
    if (std::abs(ccdf3_exact(c, a * A, b * A, g * A) - e.approx) > e.envelope + 1e-9) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(FirstOrder, RemainderScalesLikeSquare) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Corr3 c = random_corr3(rng, 0.9, 1e-2);
    const double a = u(rng), b = u(rng), g = u(rng);
    const Corr2 c2(c.rho12());
    std::vector<double> r3, r2;
    for (double A : {0.2, 0.1, 0.05, 0.025}) {
      const auto e3 = expand_ccdf3(c, {A, a, b, g});
      r3.push_back(std::abs(ccdf3_exact(c, a * A, b * A, g * A) - e3.approx) / (A * A));
      const auto e2 = expand_ccdf2(c2, {A, a, b, {}});
      r2.push_back(std::abs(ccdf2_exact(c2, a * A, b * A) - e2.approx) / (A * A));
    }
    for (const auto* r : {&r3, &r2}) {
      const double bound = 2.0 * std::max((*r)[0], (*r)[1]) + 1e-6;
      for (double v : *r) EXPECT_LE(v, bound) << "trial " << trial;
    }
  }
}
