#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "onebit/bound.hpp"
#include "onebit/errors.hpp"
#include "onebit/expansion.hpp"
#include "oracles.hpp"

using namespace onebit::bound;
using onebit::waveform::boundary_point;

namespace {

const double kPi = oracle::kPi;
const Features kSinc{2 / kPi, 1.0, 2 / kPi};
const Features kOpt14{0.6890767, 0.9750182, 0.6890767};

Features symmetric(onebit::waveform::BoundaryPoint b) { return {b.alpha0, b.beta0, b.alpha0}; }

}  // namespace

TEST(Pattern, IndexRoundTrip) {
  for (int i = 0; i < 8; ++i) {
    const Pattern s = pattern_from_index(i);
    EXPECT_EQ(pattern_index(s), i);
    EXPECT_EQ(pattern_index({-s[0], -s[1], -s[2]}), 7 - i);
  }
  EXPECT_EQ(pattern_index({1, 1, 1}), 0);
  EXPECT_EQ(pattern_index({-1, 1, 1}), 4);
  EXPECT_EQ(pattern_index({1, 1, -1}), 1);
  EXPECT_THROW(pattern_index({1, 0, 1}), onebit::DomainError);
  EXPECT_THROW(pattern_from_index(8), onebit::DomainError);
}

TEST(BaseLaw, Masses) {
  const TripleLaw law = base_law();
  const double same = 0.234833954855028321, alternating = 0.0151660451449716794;
  for (int i = 0; i < 8; ++i) {
    const Pattern s = pattern_from_index(i);
    double expected = 0.125;
    if (s[0] == s[1] && s[1] == s[2]) expected = same;
    if (s[0] == s[2] && s[0] != s[1]) expected = alternating;
    EXPECT_NEAR(law.conditional[i], expected, 1e-15) << i;
    EXPECT_NEAR(law.unconditional[i], expected, 1e-15) << i;
  }
  EXPECT_NO_THROW(law.validate());
}

TEST(LinearCoefficient, MatchesFiniteDifferenceOracle) {
  // Central differences of a nested scipy quadrature of the trivariate law.
  struct Case {
    Features f;
    Pattern s;
    double value;
  };
  const std::vector<Case> cases{
      {kSinc, {1, 1, 1}, 0.64576810},   {kSinc, {1, 1, -1}, 0.17254168},
      {kSinc, {1, -1, 1}, -0.00914838}, {kSinc, {-1, 1, 1}, 0.17254168},
      {kSinc, {-1, -1, 1}, -0.17254168}, {kOpt14, {1, 1, 1}, 0.68494749},
      {kOpt14, {1, 1, -1}, 0.14709986}, {kOpt14, {1, -1, 1}, 0.00412916},
      {{0.3, -0.5, 0.9}, {1, 1, 1}, 0.42013475}, {{0.3, -0.5, 0.9}, {1, 1, -1}, -0.52013474},
      {{0.3, -0.5, 0.9}, {1, -1, 1}, 0.17986519}, {{0.3, -0.5, 0.9}, {-1, 1, 1}, -0.22013480},
  };
  for (const auto& c : cases) EXPECT_NEAR(linear_coefficient(c.f, c.s), c.value, 1e-6);
}

TEST(LinearCoefficient, AgreesWithTrivariateExpansion) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto K = onebit::gaussmath::Corr3::double_rate();
  const double A = std::sqrt(1e-4);
  for (int trial = 0; trial < 50; ++trial) {
    const Features f{u(rng), u(rng), u(rng)};
    for (int i = 0; i < 8; ++i) {
      const Pattern s = pattern_from_index(i);
      const auto e = onebit::expansion::expand_ccdf3(
          K.flipped(s), {A, s[0] * f.alpha0, s[1] * f.beta0, s[2] * f.gamma0});
      EXPECT_NEAR(e.base, base_mass(s), 1e-15);
      EXPECT_NEAR(e.linear, A / std::sqrt(2 * kPi) * linear_coefficient(f, s), 1e-15);
    }
  }
}

TEST(FirstOrderLaw, SincExample) {
  const TripleLaw law = cond_triple_law_first_order(1e-4, kSinc);
  EXPECT_NEAR(law.conditional[0], 0.234833954855 + std::sqrt(1e-4 / (2 * kPi)) * 0.64576810, 1e-8);
  EXPECT_NEAR(law.conditional[0], 0.237410, 1e-6);
}

TEST(FirstOrderLaw, NormalizedAndReflected) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.2, 1.2), p(0.0, 1e-2);
  for (int trial = 0; trial < 500; ++trial) {
    const Features f{u(rng), u(rng), u(rng)};
    const double P = trial % 2 ? p(rng) * 0.1 : p(rng);
    const TripleLaw law = cond_triple_law_first_order(P, f);
    EXPECT_NO_THROW(law.validate(1e-12));
    for (int i = 0; i < 8; ++i) {
      EXPECT_EQ(law.conditional_negative(i), law.conditional[7 - i]);
      EXPECT_EQ(law.unconditional[i], law.unconditional[7 - i]);
    }
  }
  EXPECT_NO_THROW(cond_triple_law_first_order(0.0, {0, 0, 0}).validate());
}

TEST(FirstOrderLaw, RejectsLargePower) {
  EXPECT_THROW(cond_triple_law_first_order(5.0, {3, 3, 3}), onebit::DomainError);
  EXPECT_THROW(cond_triple_law_first_order(-1.0, kSinc), onebit::DomainError);
  EXPECT_THROW(cond_triple_law_first_order(1e-4, {NAN, 0, 0}), onebit::DomainError);
}

TEST(Posterior, Examples) {
  for (int i = 0; i < 8; ++i) EXPECT_EQ(posterior_first_order(0.0, kSinc, pattern_from_index(i)), 0.5);
  const Features f = symmetric(boundary_point(1.4, {}));
  EXPECT_NEAR(posterior_first_order(1e-4, f, {1, 1, 1}), 0.5 + std::sqrt(1e-4 / (2 * kPi)) * 0.68494749 / 0.469667909710, 1e-8);
  EXPECT_NEAR(posterior_first_order(1e-4, f, {1, 1, 1}), 0.505818, 1e-6);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Features g{u(rng), u(rng), u(rng)};
    for (int i = 0; i < 8; ++i) {
      const Pattern s = pattern_from_index(i);
      EXPECT_NEAR(posterior_first_order(1e-5, g, s) + posterior_first_order(1e-5, g, {-s[0], -s[1], -s[2]}), 1.0, 1e-14);
    }
  }
}

TEST(MiFirstOrder, Examples) {
  EXPECT_EQ(mi_first_order(1e-3, {0, 0, 0}), 0.0);
  const Features f = symmetric(boundary_point(1.4, {}));
  EXPECT_NEAR(mi_first_order(1.0, f), 1.172574 / kPi, 1e-6);
  EXPECT_NEAR(2.0 * mi_first_order(1.0, f), 0.7464832, 1e-7);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Features g{u(rng), u(rng), u(rng)};
    const double P = p(rng);
    EXPECT_EQ(mi_first_order(2 * P, g), 2 * mi_first_order(P, g));
  }
}

TEST(MiFirstOrder, MatchesMutualInformationOfFirstOrderLaw) {
  for (const Features& f : {kSinc, kOpt14, Features{0.3, -0.5, 0.9}}) {
    const double P = 1e-6;
    const TripleLaw law = cond_triple_law_first_order(P, f);
    std::array<double, 8> minus{};
    for (int i = 0; i < 8; ++i) minus[i] = law.conditional_negative(i);
    const double direct = oracle::mi_direct(law.conditional, minus);
    EXPECT_NEAR(mutual_information(law), direct, 1e-15);
    EXPECT_NEAR(direct / mi_first_order(P, f), 1.0, 1e-3);
  }
}

TEST(MutualInformation, SingleSample) {
  EXPECT_EQ(mutual_information_single(0.5), 0.0);
  EXPECT_NEAR(mutual_information_single(1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(mutual_information_single(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(mutual_information_single(0.8), std::log(2.0) - oracle::binary_entropy(0.8), 1e-15);
  EXPECT_THROW(mutual_information_single(1.1), onebit::DomainError);
}

TEST(RatePerUnitCost, Examples) {
  const ChannelParams ch{1, 1, 0};
  EXPECT_EQ(rate_per_unit_cost({0, 0, 0}, ch).normalized, 0.0);
  EXPECT_NEAR(rate_per_unit_cost(kSinc, ch).normalized, 0.7186297, 1e-7);
  const auto b = rate_breakdown(symmetric(boundary_point(1.4, ch)), ch);
  EXPECT_NEAR(b.slope.normalized, 0.7464832, 1e-7);
  const std::array<double, 4> terms{0.998904, 0.086554, 0.000562, 0.086554};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(b.terms[k], terms[k], 1e-6);
  EXPECT_NEAR(rate_per_unit_cost(symmetric(boundary_point(1.4, {1, 4, 0})), {1, 4, 0}).value,
              0.7464832 / 4.0, 1e-7);
}

TEST(RatePerUnitCost, MergedFormMatchesFourTerms) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = u(rng), b = u(rng);
    EXPECT_NEAR(rate_symmetric_normalized(a, b), rate_per_unit_cost({a, b, a}, {}).normalized, 1e-14);
  }
}

TEST(RatePerUnitCost, BandwidthInvariant) {
  const Features unit = symmetric(boundary_point(0.9, {}));
  const double ref = rate_per_unit_cost(unit, {1, 1, 0}).normalized;
  for (double W : {0.5, 1.0, 8.0}) {
    const ChannelParams ch{W, 1.0, 0};
    const double s = 1.0 / std::sqrt(W);
    EXPECT_NEAR(rate_per_unit_cost({unit.alpha0 * s, unit.beta0 * s, unit.gamma0 * s}, ch).normalized, ref, 1e-12);
  }
}

TEST(RatePerUnitCost, FeasibleRangeAndConvexity) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double h = 1e-3;
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = u(rng), b = u(rng);
    auto R = [](double x, double y) { return rate_symmetric_normalized(x, y); };
    const double faa = (R(a + h, b) - 2 * R(a, b) + R(a - h, b)) / (h * h);
    const double fbb = (R(a, b + h) - 2 * R(a, b) + R(a, b - h)) / (h * h);
    const double fab = (R(a + h, b + h) - R(a + h, b - h) - R(a - h, b + h) + R(a - h, b - h)) / (4 * h * h);
    EXPECT_GT(faa, 0.0);
    EXPECT_GT(fbb, 0.0);
    EXPECT_GT(faa * fbb - fab * fab, 0.0);
  }
  for (double lambda = -10.0; lambda <= 10.0; lambda += 0.1) {
    const double r = rdot_of_lambda(lambda);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(Rdot, Examples) {
  EXPECT_NEAR(rdot_of_lambda(0.0), 0.7186297, 1e-7);
  EXPECT_NEAR(rdot_of_lambda(1.4), 0.7465, 5e-4);
  EXPECT_LT(rdot_of_lambda(1.3), rdot_of_lambda(1.4));
  EXPECT_LT(rdot_of_lambda(1.5), rdot_of_lambda(1.4));
}

TEST(Rdot, DominanceAndSandwich) {
  const auto best = optimize_lambda(-5.0, 5.0);
  for (int i = -500; i <= 500; ++i) {
    const double lambda = 0.01 * i;
    const double r = rdot_of_lambda(lambda);
    EXPECT_LE(r, 0.7465 + 1e-3);
    EXPECT_LE(r, best.value + 1e-12) << lambda;
    if (r > 0.7465 - 1e-4) EXPECT_NEAR(lambda, 1.4, 0.2);
  }
  EXPECT_LT(nyquist_slope({}).normalized, best.value);
  EXPECT_LT(best.value, 1.0);
}

TEST(OptimizeLambda, Examples) {
  const auto wide = optimize_lambda(-5.0, 5.0, 1e-4);
  EXPECT_NEAR(wide.lambda_star, 1.4, 0.05);
  EXPECT_NEAR(wide.value, 0.7465, 1e-3);
  EXPECT_NEAR(wide.lambda_star, 1.382469, 1e-4);
  EXPECT_FALSE(wide.at_endpoint);
  EXPECT_GT(wide.iterations, 0);
  const auto narrow = optimize_lambda(1.3, 1.5, 1e-4);
  EXPECT_NEAR(narrow.lambda_star, wide.lambda_star, 1e-4);
  EXPECT_NEAR(narrow.value, wide.value, 1e-9);
}

TEST(OptimizeLambda, EndpointAndErrors) {
  const auto edge = optimize_lambda(2.0, 3.0);
  EXPECT_TRUE(edge.at_endpoint);
  EXPECT_EQ(edge.lambda_star, 2.0);
  EXPECT_THROW(optimize_lambda(1.0, 1.0), onebit::DomainError);
  EXPECT_THROW(optimize_lambda(0.0, 1.0, 0.0), onebit::DomainError);
}

TEST(Baselines, Shannon) {
  EXPECT_EQ(shannon_capacity({1, 1, 0}), 0.0);
  EXPECT_NEAR(shannon_capacity({1, 1, 1}), std::log(2.0), 1e-15);
  const double P = 1e-8;
  EXPECT_NEAR(shannon_capacity({1, 1, P}) / P, 1.0, 1e-6);
  EXPECT_NEAR(shannon_capacity({3, 2, P}) / P, 0.5, 1e-6);
}

TEST(Baselines, HardLimitedSample) {
  EXPECT_EQ(hl_capacity(0.0, 1.0), 0.0);
  EXPECT_NEAR(hl_capacity(1.0, 1.0), 0.255713939632826199, 1e-14);
  EXPECT_NEAR(hl_capacity(1.0, 1.0), std::log(2.0) - oracle::binary_entropy(oracle::q(1.0)), 1e-14);
  EXPECT_NEAR(hl_capacity(2.0, 4.0), hl_capacity(0.5, 1.0), 1e-15);
  for (double s2 : {1.0, 3.0}) {
    const double P = 1e-6 * s2;
    EXPECT_NEAR(hl_capacity(P, s2) / P * s2 * kPi, 1.0, 1e-2);
  }
  EXPECT_THROW(hl_capacity(1.0, 0.0), onebit::DomainError);
}

TEST(Baselines, Nyquist) {
  EXPECT_NEAR(nyquist_slope({1, 1, 0}).value, 0.636620, 1e-6);
  EXPECT_NEAR(nyquist_slope({1, 2, 0}).value, 0.318310, 1e-6);
  EXPECT_DOUBLE_EQ(nyquist_slope({1, 2, 0}).normalized, 2 / kPi);
  for (double W : {0.5, 1.0, 4.0}) {
    const ChannelParams ch{W, 1.5, 0};
    const double beta0 = 1.0 / std::sqrt(W * ch.N0);
    EXPECT_NEAR(single_sample_rate(beta0, ch).value, nyquist_slope(ch).value, 1e-14);
    // Same number from the single-sample posterior expansion.
    const double P = 1e-8;
    const double p = 1.0 - oracle::q(std::sqrt(P) * beta0 * std::sqrt(W * ch.N0) / std::sqrt(W * ch.N0));
    (void)p;
    const double mi = mutual_information_single(1.0 - oracle::q(std::sqrt(P / (W * ch.N0))));
    EXPECT_NEAR(2 * W * mi / P, nyquist_slope(ch).value, 1e-5);
  }
}
