#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "onebit/bound.hpp"
#include "onebit/waveform.hpp"

namespace onebit::simulate {

using bound::TripleLaw;
using waveform::ChannelParams;
using waveform::Pulse;

enum class Sampling { nyquist, double_rate };

inline constexpr int kMaxEnumerationHalfWidth = 12;
inline constexpr std::uint64_t kChunkTrials = 1u << 16;

struct SimConfig {
  ChannelParams ch;
  Pulse pulse = Pulse::sinc(1.0);
  int J = 8;
  std::uint64_t n = 1000000;
  std::uint64_t seed = 1;
  Sampling sampling = Sampling::double_rate;
  unsigned threads = 1;
  // Added to every noiseless sample before the hard limiter.
  double sample_bias = 0.0;

  void validate() const;
};

struct EmpiricalJoint {
  // counts[0] given X_1 = +sqrt(P), counts[1] given X_1 = -sqrt(P); in
  // Nyquist mode only outcomes 0 (Y_1 = +1) and 1 (Y_1 = -1) occur.
  std::array<std::array<std::uint64_t, 8>, 2> counts{};
  std::uint64_t total = 0;
  Sampling sampling = Sampling::double_rate;

  int outcomes() const { return sampling == Sampling::nyquist ? 2 : 8; }
  void merge(const EmpiricalJoint& other);
};

// Normalized threshold offsets (a, b, c) of the sample triple for every
// neighbor pattern; offsets are per unit sqrt(P).
struct IsiTaps {
  std::array<double, 3> own{};                       // symbol X_1
  std::vector<std::array<double, 3>> neighbors;      // 2J entries
};

IsiTaps isi_taps(const Pulse& pulse, const ChannelParams& ch, int J);

TripleLaw exact_truncated_law(double P, const Pulse& pulse, const ChannelParams& ch, int J,
                              const QuadratureSettings& q = {}, unsigned threads = 1);

// P(Y_1 = +1 | X_1 = +sqrt(P)) averaged over the 2J neighbors.
double exact_nyquist_law(double P, const Pulse& pulse, const ChannelParams& ch, int J);

EmpiricalJoint simulate_triples(const SimConfig& cfg, double P);

double mi_plugin(const EmpiricalJoint& j);
// Delta-method standard error of the plug-in estimate.
double mi_plugin_stderr(const EmpiricalJoint& j);

struct SlopeFit {
  double slope = 0.0;
  double standard_error = 0.0;
};

SlopeFit slope_estimate(std::span<const std::pair<double, double>> points);

// Mutual information per second from the exact truncated law over a P-grid,
// followed by a fit through the origin.
struct ExactSlopeReport {
  std::vector<std::pair<double, double>> points;
  SlopeFit fit;
};

ExactSlopeReport exact_slope(std::span<const double> powers, const Pulse& pulse,
                             const ChannelParams& ch, int J, Sampling sampling,
                             const QuadratureSettings& q = {}, unsigned threads = 1);

// Default geometric grid used for slope fits.
std::vector<double> default_power_grid();

}  // namespace onebit::simulate
