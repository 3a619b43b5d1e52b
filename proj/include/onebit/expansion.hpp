#pragma once

#include <optional>

#include "onebit/gaussmath.hpp"

namespace onebit::expansion {

// Thresholds of a shifted CCDF: P(X >= -alpha A, Y >= -beta A [, Z >= -gamma A]).
struct OffsetSpec {
  double A = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> gamma;

  void validate() const;
};

struct ExpansionResult {
  double base = 0.0;      // orthant probability
  double linear = 0.0;    // first-order term, already scaled by A / sqrt(2 pi)
  double approx = 0.0;    // base + linear
  double envelope = 0.0;  // bound on |exact - approx|
};

ExpansionResult expand_ccdf2(const gaussmath::Corr2& c, const OffsetSpec& o);
double eta2_envelope(const gaussmath::Corr2& c, const OffsetSpec& o);

ExpansionResult expand_ccdf3(const gaussmath::Corr3& c, const OffsetSpec& o);
double eta3_envelope(const gaussmath::Corr3& c, const OffsetSpec& o);

// Correlations of each conditional pair given one coordinate of the triple:
// [0] is (Y, Z) given X, [1] is (X, Z) given Y, [2] is (X, Y) given Z.
// Arguments within 1e-12 of +-1 are clamped; farther out throws.
std::array<double, 3> partial_correlations(const gaussmath::Corr3& c);

}  // namespace onebit::expansion
