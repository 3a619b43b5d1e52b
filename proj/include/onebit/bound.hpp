#pragma once

#include <array>
#include <span>

#include "onebit/waveform.hpp"

namespace onebit::bound {

using waveform::ChannelParams;
using waveform::Features;

// Correlation of adjacent double-rate samples: sinc(1/2).
inline constexpr double kRho = 0.63661977236758134308;

// Sign pattern of (Y_{1/2}, Y_1, Y_{3/2}); entries are +1 or -1.
using Pattern = std::array<int, 3>;

// Index 0 is (+,+,+); bit 2 marks a negative Y_{1/2}, bit 0 a negative
// Y_{3/2}. Negating a pattern maps index i to 7 - i.
int pattern_index(const Pattern& s);
Pattern pattern_from_index(int index);

struct TripleLaw {
  std::array<double, 8> conditional{};    // given X_1 = +sqrt(P)
  std::array<double, 8> unconditional{};  // X_1 uniform on +-sqrt(P)

  // Law given X_1 = -sqrt(P), by reflection.
  double conditional_negative(int index) const { return conditional[7 - index]; }
  void validate(double tol = 1e-12) const;
};

// Builds the unconditional law from the conditional one by reflection.
TripleLaw from_conditional(const std::array<double, 8>& conditional);

TripleLaw base_law();

// First-order coefficient of sqrt(P / 2pi) in the mass of pattern s.
double linear_coefficient(const Features& f, const Pattern& s);
double base_mass(const Pattern& s);

TripleLaw cond_triple_law_first_order(double P, const Features& f);
double posterior_first_order(double P, const Features& f, const Pattern& s);
double mi_first_order(double P, const Features& f);

// I(X_1; pattern) for equiprobable antipodal X_1.
double mutual_information(const TripleLaw& law);
// I(X_1; Y) for a single hard-limited sample with P(Y = + | X_1 = +) = p.
double mutual_information_single(double p_plus_given_plus);

struct RateSlope {
  double value = 0.0;       // nats per second per watt
  double normalized = 0.0;  // value * N0
};

struct RateBreakdown {
  RateSlope slope;
  // The four bracket terms, in normalized units (features scaled to W N0 = 1).
  std::array<double, 4> terms{};
};

RateSlope rate_per_unit_cost(const Features& f, const ChannelParams& ch);
RateBreakdown rate_breakdown(const Features& f, const ChannelParams& ch);

// Normalized rate in the merged form valid when alpha0 == gamma0; arguments
// are in normalized units.
double rate_symmetric_normalized(double alpha0, double beta0);

double rdot_of_lambda(double lambda);

struct LambdaOptimum {
  double lambda_star = 0.0;
  double value = 0.0;
  int iterations = 0;
  // Set when the best grid point is an end of the bracket.
  bool at_endpoint = false;
};

LambdaOptimum optimize_lambda(double lo, double hi, double tol = 1e-4);

double shannon_capacity(const ChannelParams& ch);
double hl_capacity(double P, double sigma2);
RateSlope nyquist_slope(const ChannelParams& ch);
// Per-unit-cost rate of one sample per symbol with offset beta0 (actual units).
RateSlope single_sample_rate(double beta0, const ChannelParams& ch);

// Capacity per unit-cost of an eight-level output quantizer at Nyquist rate,
// in units of 1/sigma^2; quoted, not computed.
inline constexpr double kOctalQuantizerSlope = 0.475;

}  // namespace onebit::bound
