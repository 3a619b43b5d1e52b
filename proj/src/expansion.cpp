#include "onebit/expansion.hpp"

#include <algorithm>
#include <cmath>

#include "onebit/errors.hpp"

namespace onebit::expansion {

using gaussmath::Corr2;
using gaussmath::Corr3;
using gaussmath::kInvSqrt2Pi;
using gaussmath::kPi;

namespace {

constexpr double kClampSlack = 1e-12;

double clamp_unit(double r) {
  if (std::abs(r) > 1.0 + kClampSlack) {
    throw NumericError("partial correlation outside [-1, 1]", std::abs(r) - 1.0);
  }
  return std::clamp(r, -1.0, 1.0);
}

double one_minus_sq(double r) { return (1.0 - r) * (1.0 + r); }

// Bivariate envelope eta(A, a, b) at correlation rho, for a, b >= 0.
double eta_pair(double rho, double A, double a, double b) {
  const double v = one_minus_sq(rho);
  const double root = std::sqrt(2.0 * kPi * v);
  const double cube = 6.0 * std::sqrt(2.0 * kPi) * v * std::sqrt(v);
  const double twelve = 12.0 * std::sqrt(2.0 * kPi);
  const double r = std::abs(rho);

  const double first = a * b / root + r * a * a / root +
                       a * std::pow(b + r * a, 3) * A * A / cube + a * a * a * A / twelve;
  const double second = r * b * b / root + r * r * r * std::pow(b, 4) * A * A / cube +
                        b * b * b * A / twelve;
  return first + second;
}

}  // namespace

void OffsetSpec::validate() const {
  if (!std::isfinite(A) || !(A >= 0.0)) {
    throw DomainError("OffsetSpec: A must be finite and >= 0");
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta) || (gamma && !std::isfinite(*gamma))) {
    throw DomainError("OffsetSpec: offsets must be finite");
  }
}

std::array<double, 3> partial_correlations(const Corr3& c) {
  const double s12 = std::sqrt(one_minus_sq(c.rho12()));
  const double s13 = std::sqrt(one_minus_sq(c.rho13()));
  const double s23 = std::sqrt(one_minus_sq(c.rho23()));
  return {clamp_unit((c.rho23() - c.rho12() * c.rho13()) / (s12 * s13)),
          clamp_unit((c.rho13() - c.rho12() * c.rho23()) / (s12 * s23)),
          clamp_unit((c.rho12() - c.rho13() * c.rho23()) / (s13 * s23))};
}

double eta2_envelope(const Corr2& c, const OffsetSpec& o) {
  o.validate();
  if (o.gamma) {
    throw DomainError("eta2_envelope: gamma must be absent");
  }
  return eta_pair(c.rho(), o.A, std::abs(o.alpha), std::abs(o.beta));
}

ExpansionResult expand_ccdf2(const Corr2& c, const OffsetSpec& o) {
  const double eta = eta2_envelope(c, o);
  ExpansionResult r;
  r.base = gaussmath::orthant2(c);
  if (o.A == 0.0) {
    r.approx = r.base;
    return r;
  }
  r.linear = 0.5 * (o.alpha + o.beta) * o.A * kInvSqrt2Pi;
  r.approx = r.base + r.linear;
  r.envelope = o.A * o.A * eta;
  return r;
}

double eta3_envelope(const Corr3& c, const OffsetSpec& o) {
  o.validate();
  if (!o.gamma) {
    throw DomainError("eta3_envelope: gamma must be present");
  }
  const double A = o.A;
  const double a = std::abs(o.alpha);
  const double b = std::abs(o.beta);
  const double g = std::abs(*o.gamma);
  const double r12 = std::abs(c.rho12());
  const double r13 = std::abs(c.rho13());
  const double r23 = std::abs(c.rho23());
  const double s12 = std::sqrt(one_minus_sq(c.rho12()));
  const double s13 = std::sqrt(one_minus_sq(c.rho13()));
  const double s23 = std::sqrt(one_minus_sq(c.rho23()));
  const auto partial = partial_correlations(c);

  const double sqrt2pi = std::sqrt(2.0 * kPi);
  const double twelve = 12.0 * sqrt2pi;
  const double two = 2.0 * sqrt2pi;

  const double x_u = (b + r12 * a) / s12;
  const double x_v = (g + r13 * a) / s13;
  const double eta_x = a * a * a * A / twelve + a / two * (x_u + x_v) +
                       a * eta_pair(partial[0], A, x_u, x_v) * A;

  const double y_u = r12 * b / s12;
  const double y_v = (g + r23 * b) / s23;
  const double eta_y = b * b * b * A / twelve + b / two * (y_u + y_v) +
                       b * eta_pair(partial[1], A, y_u, y_v) * A;

  const double z_u = r13 * g / s13;
  const double z_v = r23 * g / s23;
  const double eta_z = g * g * g * A / twelve + g * g / two * (r13 / s13 + r23 / s23) +
                       g * eta_pair(partial[2], A, z_u, z_v) * A;

  return eta_x + eta_y + eta_z;
}

ExpansionResult expand_ccdf3(const Corr3& c, const OffsetSpec& o) {
  const double eta = eta3_envelope(c, o);
  ExpansionResult r;
  r.base = gaussmath::orthant3(c);
  if (o.A == 0.0) {
    r.approx = r.base;
    return r;
  }
  const auto partial = partial_correlations(c);
  const double g = *o.gamma;
  const double bracket = (o.alpha + o.beta + g) / 4.0 +
                         (o.alpha * std::asin(partial[0]) + o.beta * std::asin(partial[1]) +
                          g * std::asin(partial[2])) /
                             (2.0 * kPi);
  r.linear = o.A * kInvSqrt2Pi * bracket;
  r.approx = r.base + r.linear;
  r.envelope = o.A * o.A * eta;
  return r;
}

}  // namespace onebit::expansion
