#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>

#include "onebit/quadrature.hpp"

namespace onebit::waveform {

struct ChannelParams {
  double W = 1.0;   // bandwidth, Hz
  double N0 = 1.0;  // noise level; the double-sided density is N0 / 2
  double P = 0.0;   // average power, W

  void validate() const;
};

enum class PulseFamily { sinc, optimal, raised };

std::string to_string(PulseFamily f);

// Sample offsets of the double-rate triple, in units of 1/sqrt(W N0): the
// pulse at -1/(4W), 0 and +1/(4W).
struct Features {
  double alpha0 = 0.0;
  double beta0 = 0.0;
  double gamma0 = 0.0;
};

struct BoundaryPoint {
  double alpha0 = 0.0;
  double beta0 = 0.0;
};

// Unit-energy pulse bandlimited to W Hz. Cheap to copy; copies share the
// normalization constant and the tap cache.
class Pulse {
 public:
  static Pulse sinc(double W);
  static Pulse optimal(double lambda, double W);
  static Pulse raised(double lambda, double xi, double W, const QuadratureSettings& q = {});

  PulseFamily family() const noexcept;
  double lambda() const noexcept;
  double xi() const noexcept;
  double W() const noexcept;
  // Energy of the un-normalized shape (1 for sinc).
  double psi() const noexcept;
  std::string describe() const;

  double value(double t) const;
  // Value at normalized time u = 2 W t; exact on the quarter grid u = k / 2.
  double value_normalized(double u) const;
  double spectrum(double f) const;

  // Parseval energy of the spectrum over [-W, W].
  double energy(const QuadratureSettings& q = {}) const;

  // g(k / (4W)) for k = -L..L, computed once per L and shared by all copies.
  std::span<const double> quarter_taps(int L) const;

 private:
  struct State;
  explicit Pulse(std::shared_ptr<State> state);
  std::shared_ptr<State> state_;
};

double sinc(double x);

double g_opt(double lambda, double t, double W);
double g_hat_opt(double lambda, double f, double W);
double g_raised(double lambda, double xi, double t, double W, const QuadratureSettings& q = {});

// Energy of the un-normalized raised shape in normalized time.
double psi_norm(double lambda, double xi, double W, const QuadratureSettings& q = {});

// lambda^2 / 2 + 4 lambda / pi + 1
double psi_limit(double lambda);

Features features_from_pulse(const Pulse& p, const ChannelParams& ch);
BoundaryPoint boundary_point(double lambda, const ChannelParams& ch);

struct SummabilityReport {
  bool admissible = false;
  // Sums of |g((l + tau) / (2W))| over |l| <= limit, tau = -1/2, 0, +1/2.
  std::array<double, 3> partial_sums{};
  // Log-log envelope slope over the last decade of each grid.
  std::array<double, 3> tail_slopes{};
};

inline constexpr double kTailSlopeThreshold = -1.9;

SummabilityReport check_summability(const Pulse& p, int half_grid_limit);

// Largest over the three sample phases of sum_{|l - 1| > J} |g((tau - l)/(2W))| / sqrt(2W):
// the neglected ISI amplitude per unit symbol, summed out to `horizon` slots.
double truncation_tail(const Pulse& p, int J, int horizon = 100000);

}  // namespace onebit::waveform
