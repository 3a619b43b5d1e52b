#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "onebit/quadrature.hpp"

namespace onebit::gaussmath {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Sign vector entries are +1 or -1.
using Signs3 = std::array<int, 3>;

// Correlation of a standardized Gaussian pair; |rho| < 1.
class Corr2 {
 public:
  explicit Corr2(double rho);

  double rho() const noexcept { return rho_; }
  // sqrt(1 - rho^2)
  double conditional_sd() const noexcept { return sd_; }
  Corr2 flipped(int s1, int s2) const { return Corr2(s1 * s2 * rho_); }

 private:
  double rho_;
  double sd_;
};

// Correlation structure of a standardized Gaussian triple (X, Y, Z).
// Rejects |rho_ij| >= 1 and det(K) <= 1e-12.
class Corr3 {
 public:
  Corr3(double rho12, double rho13, double rho23);

  double rho12() const noexcept { return r12_; }
  double rho13() const noexcept { return r13_; }
  double rho23() const noexcept { return r23_; }
  double determinant() const noexcept;

  // Correlations of (s1 X, s2 Y, s3 Z).
  Corr3 flipped(const Signs3& s) const;

  // Correlation structure of the double-rate sample triple: adjacent samples
  // at distance 1/(4W) share correlation 2/pi, the outer pair is uncorrelated.
  static Corr3 double_rate();

 private:
  double r12_;
  double r13_;
  double r23_;
};

double q_function(double x);

// Q(x) - 1/2 + x/sqrt(2 pi), evaluated without cancellation near zero.
double q_remainder(double x);

double orthant2(const Corr2& c);
double orthant3(const Corr3& c);

// P(X >= -a, Y >= -b)
double ccdf2_exact(const Corr2& c, double a, double b, const QuadratureSettings& q = {});

// P(X >= -a, Y >= -b, Z >= -g)
double ccdf3_exact(const Corr3& c, double a, double b, double g, const QuadratureSettings& q = {});

// Masses of all eight sign orthants of (X + a, Y + b, Z + g). Index bit k set
// means coordinate k (X = bit 2, Y = bit 1, Z = bit 0) is negative, so index 0
// is the all-nonnegative orthant. Uses one trivariate quadrature plus
// inclusion-exclusion.
std::array<double, 8> orthant_masses3(const Corr3& c, double a, double b, double g,
                                      const QuadratureSettings& q = {});

// Lower-triangular factor of a Corr3, applied to iid standard normals.
class Mvn3Sampler {
 public:
  explicit Mvn3Sampler(const Corr3& c);

  template <class Urng>
  std::array<double, 3> operator()(Urng& rng) {
    const double z1 = normal_(rng);
    const double z2 = normal_(rng);
    const double z3 = normal_(rng);
    return {z1, l21_ * z1 + l22_ * z2, l31_ * z1 + l32_ * z2 + l33_ * z3};
  }

 private:
  double l21_, l22_, l31_, l32_, l33_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::vector<std::array<double, 3>> sample_mvn3(const Corr3& c, std::size_t n, std::uint64_t seed);

}  // namespace onebit::gaussmath
