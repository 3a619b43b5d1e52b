#include "onebit/gaussmath.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <algorithm>

#include "onebit/errors.hpp"

namespace onebit::gaussmath {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
// Standard normal mass beyond ten standard deviations is below 1e-23.
constexpr double kTailCut = 10.0;

void require_finite(double x, const char* who) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(who) + ": argument must be finite");
  }
}

double phi(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// P(N(0,1) >= -x)
double upper_mass(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// Integrates density(x) * h(x) over x >= -a, where the total over all x is
// known. For a > 0 the complementary range (-inf, -a] is integrated and
// subtracted from the total. Both ranges are cut at ten standard deviations.
template <class H>
double shifted_tail(double a, double total, H&& h, const QuadratureSettings& q) {
  auto integrand = [&](double x) {
    const double density = phi(x);
    return density == 0.0 ? 0.0 : density * h(x);
  };
  if (a > 0.0) {
    if (a >= kTailCut) {
      return total;
    }
    return total - integrate(integrand, -kTailCut, -a, q).value;
  }
  return integrate(integrand, -a, -a + kTailCut, q).value;
}

double ccdf2_unchecked(double rho, double sd, double a, double b, const QuadratureSettings& q) {
  const double inv = 1.0 / sd;
  return shifted_tail(a, upper_mass(b), [=](double x) { return upper_mass((b + rho * x) * inv); }, q);
}

}  // namespace

Corr2::Corr2(double rho) : rho_(rho), sd_(0.0) {
  if (!std::isfinite(rho) || !(std::abs(rho) < 1.0)) {
    throw DomainError("Corr2: |rho| must be < 1");
  }
  sd_ = std::sqrt((1.0 - rho) * (1.0 + rho));
}

Corr3::Corr3(double rho12, double rho13, double rho23) : r12_(rho12), r13_(rho13), r23_(rho23) {
  for (double r : {rho12, rho13, rho23}) {
    if (!std::isfinite(r) || !(std::abs(r) < 1.0)) {
      throw DomainError("Corr3: each |rho_ij| must be < 1");
    }
  }
  if (!(determinant() > 1e-12)) {
    throw DomainError("Corr3: correlation matrix is singular or indefinite (det <= 1e-12)");
  }
}

double Corr3::determinant() const noexcept {
  return 1.0 - r12_ * r12_ - r13_ * r13_ - r23_ * r23_ + 2.0 * r12_ * r13_ * r23_;
}

Corr3 Corr3::flipped(const Signs3& s) const {
  return Corr3(s[0] * s[1] * r12_, s[0] * s[2] * r13_, s[1] * s[2] * r23_);
}

Corr3 Corr3::double_rate() {
  constexpr double rho = 2.0 / kPi;
  return Corr3(rho, 0.0, rho);
}

double q_function(double x) {
  require_finite(x, "q_function");
  return 0.5 * std::erfc(x / kSqrt2);
}

double q_remainder(double x) {
  require_finite(x, "q_remainder");
  if (std::abs(x) >= 1.0) {
    return q_function(x) - 0.5 + kInvSqrt2Pi * x;
  }
  // Q(x) = 1/2 - phi-series; only the n >= 1 terms survive.
  const double x2 = x * x;
  double power = x;  // x^(2n+1) / (2^n n!)
  double sum = 0.0;
  for (int n = 1; n < 40; ++n) {
    power *= -x2 / (2.0 * n);
    const double term = power / (2.0 * n + 1.0);
    sum -= term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) {
      break;
    }
  }
  return kInvSqrt2Pi * sum;
}

double orthant2(const Corr2& c) { return 0.25 + std::asin(c.rho()) / (2.0 * kPi); }

double orthant3(const Corr3& c) {
  return 0.125 + (std::asin(c.rho12()) + std::asin(c.rho13()) + std::asin(c.rho23())) / (4.0 * kPi);
}

double ccdf2_exact(const Corr2& c, double a, double b, const QuadratureSettings& q) {
  require_finite(a, "ccdf2_exact");
  require_finite(b, "ccdf2_exact");
  q.validate();
  return ccdf2_unchecked(c.rho(), c.conditional_sd(), a, b, q);
}

double ccdf3_exact(const Corr3& c, double a, double b, double g, const QuadratureSettings& q) {
  require_finite(a, "ccdf3_exact");
  require_finite(b, "ccdf3_exact");
  require_finite(g, "ccdf3_exact");
  q.validate();

  // Given X = x, (Y, Z) is a shifted pair with these scales and correlation.
  const double s12 = std::sqrt((1.0 - c.rho12()) * (1.0 + c.rho12()));
  const double s13 = std::sqrt((1.0 - c.rho13()) * (1.0 + c.rho13()));
  double r = (c.rho23() - c.rho12() * c.rho13()) / (s12 * s13);
  if (std::abs(r) >= 1.0) {
    throw DomainError("ccdf3_exact: conditional correlation outside (-1, 1)");
  }
  const double sd = std::sqrt((1.0 - r) * (1.0 + r));
  const double r12 = c.rho12();
  const double r13 = c.rho13();

  auto conditional = [&](double x) {
    return ccdf2_unchecked(r, sd, (b + r12 * x) / s12, (g + r13 * x) / s13, q);
  };
  const double pair = a > 0.0 ? ccdf2_exact(Corr2(c.rho23()), b, g, q) : 0.0;
  return shifted_tail(a, pair, conditional, q);
}

std::array<double, 8> orthant_masses3(const Corr3& c, double a, double b, double g,
                                      const QuadratureSettings& q) {
  // joint[S] = P(coordinates in S all nonnegative); S as a bitmask, X = bit 2.
  std::array<double, 8> joint{};
  joint[0] = 1.0;
  joint[4] = upper_mass(a);
  joint[2] = upper_mass(b);
  joint[1] = upper_mass(g);
  joint[6] = ccdf2_exact(Corr2(c.rho12()), a, b, q);
  joint[5] = ccdf2_exact(Corr2(c.rho13()), a, g, q);
  joint[3] = ccdf2_exact(Corr2(c.rho23()), b, g, q);
  joint[7] = ccdf3_exact(c, a, b, g, q);

  std::array<double, 8> masses{};
  for (unsigned negative = 0; negative < 8; ++negative) {
    const unsigned positive = 7u & ~negative;
    double m = 0.0;
    // Sum over subsets T of the negative set: (-1)^|T| joint[positive | T].
    for (unsigned t = negative;; t = (t - 1) & negative) {
      const int bits = __builtin_popcount(t);
      m += (bits % 2 == 0 ? 1.0 : -1.0) * joint[positive | t];
      if (t == 0) {
        break;
      }
    }
    masses[negative] = m;
  }
  return masses;
}

Mvn3Sampler::Mvn3Sampler(const Corr3& c) {
  l21_ = c.rho12();
  l22_ = std::sqrt(1.0 - l21_ * l21_);
  l31_ = c.rho13();
  l32_ = (c.rho23() - l21_ * l31_) / l22_;
  const double rest = 1.0 - l31_ * l31_ - l32_ * l32_;
  if (!(rest > 0.0)) {
    throw DomainError("Mvn3Sampler: correlation matrix is not positive definite");
  }
  l33_ = std::sqrt(rest);
}

std::vector<std::array<double, 3>> sample_mvn3(const Corr3& c, std::size_t n, std::uint64_t seed) {
  if (n < 1) {
    throw DomainError("sample_mvn3: n must be >= 1");
  }
  Mvn3Sampler sampler(c);
  std::mt19937_64 rng(seed);
  std::vector<std::array<double, 3>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(sampler(rng));
  }
  return out;
}

}  // namespace onebit::gaussmath
