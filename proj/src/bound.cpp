#include "onebit/bound.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "onebit/errors.hpp"
#include "onebit/gaussmath.hpp"

namespace onebit::bound {

using gaussmath::kPi;

namespace {

constexpr double kMassSlack = 1e-9;

const double kAsinRho = std::asin(kRho);
// Arcsines of the partial correlations of the double-rate triple.
const double kOuter = std::asin(kRho / std::sqrt(1.0 - kRho * kRho));
const double kMiddle = std::asin(kRho * kRho / (1.0 - kRho * kRho));

void require_power(double P) {
  if (!std::isfinite(P) || !(P >= 0.0)) {
    throw DomainError("power P must be finite and >= 0");
  }
}

void require_features(const Features& f) {
  if (!std::isfinite(f.alpha0) || !std::isfinite(f.beta0) || !std::isfinite(f.gamma0)) {
    throw DomainError("features must be finite");
  }
}

// x log(1+x) + (-x) log(1-x) style sum with 0 log 0 = 0.
double xlog1p(double weight, double x) { return weight == 0.0 ? 0.0 : weight * std::log1p(x); }

// Coefficients of the four distinct bracket terms in normalized units.
std::array<double, 4> bracket_terms(const Features& f) {
  const double n1 = linear_coefficient(f, {1, 1, 1});
  const double n2 = linear_coefficient(f, {1, 1, -1});
  const double n3 = linear_coefficient(f, {1, -1, 1});
  const double n4 = linear_coefficient(f, {-1, 1, 1});
  return {n1 * n1 / (0.25 + kAsinRho / kPi), 4.0 * n2 * n2, n3 * n3 / (0.25 - kAsinRho / kPi),
          4.0 * n4 * n4};
}

}  // namespace

int pattern_index(const Pattern& s) {
  int index = 0;
  for (int k = 0; k < 3; ++k) {
    if (s[k] != 1 && s[k] != -1) {
      throw DomainError("pattern entries must be +1 or -1");
    }
    if (s[k] < 0) {
      index |= 1 << (2 - k);
    }
  }
  return index;
}

Pattern pattern_from_index(int index) {
  if (index < 0 || index > 7) {
    throw DomainError("pattern index must be in [0, 7]");
  }
  Pattern s{};
  for (int k = 0; k < 3; ++k) {
    s[k] = (index >> (2 - k)) & 1 ? -1 : 1;
  }
  return s;
}

void TripleLaw::validate(double tol) const {
  double total_c = 0.0;
  double total_u = 0.0;
  for (int i = 0; i < 8; ++i) {
    if (conditional[i] < 0.0 || conditional[i] > 1.0 || unconditional[i] < 0.0 ||
        unconditional[i] > 1.0) {
      throw DomainError("TripleLaw: mass outside [0, 1]");
    }
    total_c += conditional[i];
    total_u += unconditional[i];
  }
  if (std::abs(total_c - 1.0) > tol || std::abs(total_u - 1.0) > tol) {
    throw DomainError("TripleLaw: masses do not sum to one");
  }
}

TripleLaw from_conditional(const std::array<double, 8>& conditional) {
  TripleLaw law;
  law.conditional = conditional;
  for (int i = 0; i < 8; ++i) {
    law.unconditional[i] = 0.5 * (conditional[i] + conditional[7 - i]);
  }
  return law;
}

double base_mass(const Pattern& s) {
  return 0.125 + (std::asin(s[0] * s[1] * kRho) + std::asin(s[1] * s[2] * kRho)) / (4.0 * kPi);
}

TripleLaw base_law() {
  std::array<double, 8> masses{};
  for (int i = 0; i < 8; ++i) {
    masses[i] = base_mass(pattern_from_index(i));
  }
  return from_conditional(masses);
}

double linear_coefficient(const Features& f, const Pattern& s) {
  require_features(f);
  const double direct = (s[0] * f.alpha0 + s[1] * f.beta0 + s[2] * f.gamma0) / 4.0;
  const double partial = (f.alpha0 + f.gamma0) * kOuter - f.beta0 * kMiddle;
  return direct + s[0] * s[1] * s[2] * partial / (2.0 * kPi);
}

TripleLaw cond_triple_law_first_order(double P, const Features& f) {
  require_power(P);
  const double scale = std::sqrt(P / (2.0 * kPi));
  std::array<double, 8> masses{};
  for (int i = 0; i < 8; ++i) {
    const Pattern s = pattern_from_index(i);
    const double m = base_mass(s) + scale * linear_coefficient(f, s);
    if (m < -kMassSlack || m > 1.0 + kMassSlack) {
      throw DomainError("first-order mass of pattern " + std::to_string(i) +
                        " leaves [0, 1]: P is too large for the expansion");
    }
    masses[i] = std::clamp(m, 0.0, 1.0);
  }
  return from_conditional(masses);
}

double posterior_first_order(double P, const Features& f, const Pattern& s) {
  require_power(P);
  const double p = 0.5 + std::sqrt(P / (2.0 * kPi)) * linear_coefficient(f, s) / (2.0 * base_mass(s));
  if (p < -kMassSlack || p > 1.0 + kMassSlack) {
    throw DomainError("first-order posterior leaves [0, 1]: P is too large for the expansion");
  }
  return std::clamp(p, 0.0, 1.0);
}

double mi_first_order(double P, const Features& f) {
  require_power(P);
  const auto t = bracket_terms(f);
  return P / kPi * (t[0] + t[1] + t[2] + t[3]);
}

double mutual_information(const TripleLaw& law) {
  double mi = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double plus = law.conditional[i];
    const double minus = law.conditional_negative(i);
    const double mean = 0.5 * (plus + minus);
    if (mean <= 0.0) continue;
    const double e = (plus - minus) / (2.0 * mean);
    mi += 0.5 * mean * (xlog1p(1.0 + e, e) + xlog1p(1.0 - e, -e));
  }
  return mi;
}

double mutual_information_single(double p_plus_given_plus) {
  if (!(p_plus_given_plus >= 0.0 && p_plus_given_plus <= 1.0)) {
    throw DomainError("probability must lie in [0, 1]");
  }
  const double e = 2.0 * p_plus_given_plus - 1.0;
  return 0.5 * (xlog1p(1.0 + e, e) + xlog1p(1.0 - e, -e));
}

RateBreakdown rate_breakdown(const Features& f, const ChannelParams& ch) {
  ch.validate();
  require_features(f);
  const double unit = std::sqrt(ch.W * ch.N0);
  const Features normalized{f.alpha0 * unit, f.beta0 * unit, f.gamma0 * unit};
  RateBreakdown out;
  out.terms = bracket_terms(normalized);
  const double bracket = out.terms[0] + out.terms[1] + out.terms[2] + out.terms[3];
  out.slope.normalized = 2.0 / kPi * bracket;
  out.slope.value = out.slope.normalized / ch.N0;
  return out;
}

RateSlope rate_per_unit_cost(const Features& f, const ChannelParams& ch) {
  return rate_breakdown(f, ch).slope;
}

double rate_symmetric_normalized(double alpha0, double beta0) {
  const Features f{alpha0, beta0, alpha0};
  const double n1 = linear_coefficient(f, {1, 1, 1});
  const double n2 = linear_coefficient(f, {1, 1, -1});
  const double n3 = linear_coefficient(f, {1, -1, 1});
  return 2.0 / kPi *
         (n1 * n1 / (0.25 + kAsinRho / kPi) + 8.0 * n2 * n2 + n3 * n3 / (0.25 - kAsinRho / kPi));
}

double rdot_of_lambda(double lambda) {
  const auto b = waveform::boundary_point(lambda, ChannelParams{});
  return rate_symmetric_normalized(b.alpha0, b.beta0);
}

LambdaOptimum optimize_lambda(double lo, double hi, double tol) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw DomainError("optimize_lambda: bracket must satisfy lo < hi");
  }
  if (!(tol > 0.0)) {
    throw DomainError("optimize_lambda: tol must be > 0");
  }

  // Coarse scan, then golden section on the two cells around the best point.
  constexpr int kGrid = 200;
  const double step = (hi - lo) / kGrid;
  int best = 0;
  double best_value = rdot_of_lambda(lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double v = rdot_of_lambda(lo + i * step);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  LambdaOptimum out;
  if (best == 0 || best == kGrid) {
    out.lambda_star = lo + best * step;
    out.value = best_value;
    out.at_endpoint = true;
    return out;
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo + (best - 1) * step;
  double b = lo + (best + 1) * step;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = rdot_of_lambda(c);
  double fd = rdot_of_lambda(d);
  int iterations = 0;
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = rdot_of_lambda(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = rdot_of_lambda(d);
    }
    ++iterations;
  }
  out.lambda_star = 0.5 * (a + b);
  out.value = rdot_of_lambda(out.lambda_star);
  out.iterations = iterations;
  return out;
}

double shannon_capacity(const ChannelParams& ch) {
  ch.validate();
  return ch.W * std::log1p(ch.P / (ch.W * ch.N0));
}

double hl_capacity(double P, double sigma2) {
  require_power(P);
  if (!std::isfinite(sigma2) || !(sigma2 > 0.0)) {
    throw DomainError("hl_capacity: sigma2 must be > 0");
  }
  // 1 - 2 Q(x) = erf(x / sqrt 2)
  const double e = std::erf(std::sqrt(P / sigma2) / std::sqrt(2.0));
  return 0.5 * (xlog1p(1.0 + e, e) + xlog1p(1.0 - e, -e));
}

RateSlope nyquist_slope(const ChannelParams& ch) {
  ch.validate();
  return {2.0 / (kPi * ch.N0), 2.0 / kPi};
}

RateSlope single_sample_rate(double beta0, const ChannelParams& ch) {
  ch.validate();
  const double value = 2.0 * ch.W * beta0 * beta0 / kPi;
  return {value, value * ch.N0};
}

}  // namespace onebit::bound
