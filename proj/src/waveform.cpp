#include "onebit/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/math/special_functions/cos_pi.hpp>

#include "onebit/errors.hpp"
#include "onebit/gaussmath.hpp"

namespace onebit::waveform {

using gaussmath::kPi;

namespace {

// Below this distance from the removable singularities the closed forms
// switch to the sinc-pair identity.
constexpr double kSingularBand = 1e-3;

void require_positive_bandwidth(double W) {
  if (!std::isfinite(W) || !(W > 0.0)) {
    throw DomainError("pulse bandwidth W must be finite and > 0");
  }
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + " must be finite");
  }
}

void require_rolloff(double xi) {
  if (!std::isfinite(xi) || !(xi > 0.0 && xi <= 1.0)) {
    throw DomainError("raised pulse roll-off xi must lie in (0, 1]");
  }
}

// (lambda/2) (sinc(u - 1/2) + sinc(u + 1/2))
double half_shifted_pair(double lambda, double u) {
  const double d = u * u - 0.25;
  if (std::abs(d) < kSingularBand) {
    return 0.5 * lambda * (sinc(u - 0.5) + sinc(u + 0.5));
  }
  return -0.5 * lambda * boost::math::cos_pi(u) / (kPi * d);
}

// Raised-cosine core with band edge at 1/2 in normalized frequency.
double raised_core(double xi, double u) {
  const double scale = 1.0 + xi;
  const double v = xi * u / scale;
  const double d = 1.0 - 4.0 * v * v;
  double window;
  if (std::abs(d) < kSingularBand) {
    window = 0.25 * kPi * (sinc(v - 0.5) + sinc(v + 0.5));
  } else {
    window = boost::math::cos_pi(v) / d;
  }
  return sinc(u / scale) / scale * window;
}

double raised_shape(double lambda, double xi, double u) {
  return raised_core(xi, u) + half_shifted_pair(lambda, u);
}

// Raised-cosine spectrum in normalized frequency nu = f / (2W).
double raised_taper(double xi, double nu) {
  const double a = std::abs(nu);
  const double flat = (1.0 - xi) / (2.0 * (1.0 + xi));
  if (a <= flat) {
    return 1.0;
  }
  if (a >= 0.5) {
    return 0.0;
  }
  return 0.5 * (1.0 + std::cos(kPi * (1.0 + xi) / xi * (a - flat)));
}

double time_domain_psi(double lambda, double xi, const QuadratureSettings& q) {
  const int horizon = static_cast<int>(std::ceil(std::max(2000.0, 200.0 / xi)));
  auto square = [=](double u) {
    const double h = raised_shape(lambda, xi, u);
    return h * h;
  };
  double half = 0.0;
  for (int k = 0; k < horizon; ++k) {
    half += integrate(square, k, k + 1.0, q).value;
  }
  return 2.0 * half;
}

}  // namespace

void ChannelParams::validate() const {
  if (!std::isfinite(W) || !(W > 0.0)) throw DomainError("ChannelParams: W must be > 0");
  if (!std::isfinite(N0) || !(N0 > 0.0)) throw DomainError("ChannelParams: N0 must be > 0");
  if (!std::isfinite(P) || !(P >= 0.0)) throw DomainError("ChannelParams: P must be >= 0");
}

std::string to_string(PulseFamily f) {
  switch (f) {
    case PulseFamily::sinc: return "sinc";
    case PulseFamily::optimal: return "optimal";
    case PulseFamily::raised: return "raised";
  }
  return "unknown";
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) {
    const double px = kPi * x;
    return 1.0 - px * px / 6.0;
  }
  return boost::math::sin_pi(x) / (kPi * x);
}

double psi_limit(double lambda) { return 0.5 * lambda * lambda + 4.0 * lambda / kPi + 1.0; }

double g_opt(double lambda, double t, double W) {
  require_positive_bandwidth(W);
  require_finite(lambda, "lambda");
  require_finite(t, "t");
  const double u = 2.0 * W * t;
  return std::sqrt(2.0 * W / psi_limit(lambda)) * (sinc(u) + half_shifted_pair(lambda, u));
}

double g_hat_opt(double lambda, double f, double W) {
  require_positive_bandwidth(W);
  require_finite(lambda, "lambda");
  require_finite(f, "f");
  if (std::abs(f) > W) {
    return 0.0;
  }
  return (1.0 + lambda * std::cos(kPi * f / (2.0 * W))) / std::sqrt(2.0 * W * psi_limit(lambda));
}

double psi_norm(double lambda, double xi, double W, const QuadratureSettings& q) {
  require_positive_bandwidth(W);
  require_finite(lambda, "lambda");
  require_rolloff(xi);
  q.validate();
  return time_domain_psi(lambda, xi, q);
}

double g_raised(double lambda, double xi, double t, double W, const QuadratureSettings& q) {
  require_finite(t, "t");
  const double psi = psi_norm(lambda, xi, W, q);
  return std::sqrt(2.0 * W / psi) * raised_shape(lambda, xi, 2.0 * W * t);
}

struct Pulse::State {
  PulseFamily family = PulseFamily::sinc;
  double lambda = 0.0;
  double xi = 0.0;
  double W = 1.0;
  double psi = 1.0;
  std::mutex mutex;
  std::map<int, std::vector<double>> taps;

  double shape(double u) const {
    switch (family) {
      case PulseFamily::sinc: return waveform::sinc(u);
      case PulseFamily::optimal: return waveform::sinc(u) + half_shifted_pair(lambda, u);
      case PulseFamily::raised: return raised_shape(lambda, xi, u);
    }
    return 0.0;
  }
};

Pulse::Pulse(std::shared_ptr<State> state) : state_(std::move(state)) {}

Pulse Pulse::sinc(double W) {
  require_positive_bandwidth(W);
  auto s = std::make_shared<State>();
  s->W = W;
  return Pulse(std::move(s));
}

Pulse Pulse::optimal(double lambda, double W) {
  require_positive_bandwidth(W);
  require_finite(lambda, "lambda");
  auto s = std::make_shared<State>();
  s->family = PulseFamily::optimal;
  s->lambda = lambda;
  s->W = W;
  s->psi = psi_limit(lambda);
  return Pulse(std::move(s));
}

Pulse Pulse::raised(double lambda, double xi, double W, const QuadratureSettings& q) {
  auto s = std::make_shared<State>();
  s->family = PulseFamily::raised;
  s->lambda = lambda;
  s->xi = xi;
  s->W = W;
  s->psi = psi_norm(lambda, xi, W, q);
  return Pulse(std::move(s));
}

PulseFamily Pulse::family() const noexcept { return state_->family; }
double Pulse::lambda() const noexcept { return state_->lambda; }
double Pulse::xi() const noexcept { return state_->xi; }
double Pulse::W() const noexcept { return state_->W; }
double Pulse::psi() const noexcept { return state_->psi; }

std::string Pulse::describe() const {
  std::ostringstream os;
  os << to_string(family());
  if (family() != PulseFamily::sinc) os << "(lambda=" << lambda();
  if (family() == PulseFamily::raised) os << ", xi=" << xi();
  if (family() != PulseFamily::sinc) os << ")";
  os << " W=" << W();
  return os.str();
}

double Pulse::value_normalized(double u) const {
  return std::sqrt(2.0 * state_->W / state_->psi) * state_->shape(u);
}

double Pulse::value(double t) const { return value_normalized(2.0 * state_->W * t); }

double Pulse::spectrum(double f) const {
  const State& s = *state_;
  if (std::abs(f) > s.W) {
    return 0.0;
  }
  const double nu = f / (2.0 * s.W);
  double shape = 1.0;
  if (s.family == PulseFamily::raised) {
    shape = raised_taper(s.xi, nu);
  }
  if (s.family != PulseFamily::sinc) {
    shape += s.lambda * std::cos(kPi * nu);
  }
  return shape / std::sqrt(2.0 * s.W * s.psi);
}

double Pulse::energy(const QuadratureSettings& q) const {
  q.validate();
  const double W = state_->W;
  auto square = [this](double f) {
    const double s = spectrum(f);
    return s * s;
  };
  if (family() != PulseFamily::raised) {
    return 2.0 * integrate(square, 0.0, W, q).value;
  }
  // Split at the start of the taper where the spectrum has a kink.
  const double knee = W * (1.0 - xi()) / (1.0 + xi());
  return 2.0 * (integrate(square, 0.0, knee, q).value + integrate(square, knee, W, q).value);
}

std::span<const double> Pulse::quarter_taps(int L) const {
  if (L < 0) {
    throw DomainError("quarter_taps: L must be >= 0");
  }
  std::lock_guard<std::mutex> lock(state_->mutex);
  auto it = state_->taps.find(L);
  if (it == state_->taps.end()) {
    std::vector<double> taps(2 * static_cast<std::size_t>(L) + 1);
    for (int k = -L; k <= L; ++k) {
      taps[static_cast<std::size_t>(k + L)] = value_normalized(0.5 * k);
    }
    it = state_->taps.emplace(L, std::move(taps)).first;
  }
  return it->second;
}

Features features_from_pulse(const Pulse& p, const ChannelParams& ch) {
  ch.validate();
  if (std::abs(p.W() - ch.W) > 1e-12 * ch.W) {
    throw DomainError("features_from_pulse: pulse and channel bandwidths differ");
  }
  const double scale = 1.0 / std::sqrt(2.0 * ch.W * ch.W * ch.N0);
  return {p.value_normalized(-0.5) * scale, p.value_normalized(0.0) * scale,
          p.value_normalized(0.5) * scale};
}

BoundaryPoint boundary_point(double lambda, const ChannelParams& ch) {
  require_finite(lambda, "lambda");
  ch.validate();
  const double norm = std::sqrt(psi_limit(lambda)) * std::sqrt(ch.W * ch.N0);
  return {(2.0 / kPi + 0.5 * lambda) / norm, (1.0 + 2.0 * lambda / kPi) / norm};
}

SummabilityReport check_summability(const Pulse& p, int half_grid_limit) {
  if (half_grid_limit < 10) {
    throw DomainError("check_summability: half_grid_limit must be >= 10");
  }
  const int n = half_grid_limit;
  const std::array<double, 3> phases{-0.5, 0.0, 0.5};

  double peak = 0.0;
  for (double phase : phases) {
    for (int l = -n; l <= n; ++l) {
      peak = std::max(peak, std::abs(p.value_normalized(l + phase)));
    }
  }
  const double floor = 1e-13 * peak;

  SummabilityReport report;
  report.admissible = true;
  constexpr int kBins = 10;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    double sum = 0.0;
    for (int l = -n; l <= n; ++l) {
      sum += std::abs(p.value_normalized(l + phases[i]));
    }
    report.partial_sums[i] = sum;

    // Envelope over logarithmic bins of the last decade, then a least-squares line.
    const double start = std::max(1.0, n / 10.0);
    const double width = std::log(static_cast<double>(n) / start) / kBins;
    std::array<double, kBins> bin_max{};
    std::array<double, kBins> bin_t{};
    for (int l = static_cast<int>(std::ceil(start)); l <= n; ++l) {
      const double t = std::abs(l + phases[i]);
      const double g = std::abs(p.value_normalized(l + phases[i]));
      if (g <= floor || t < start) continue;
      const int b = std::min(kBins - 1, static_cast<int>(std::log(t / start) / width));
      if (g > bin_max[b]) {
        bin_max[b] = g;
        bin_t[b] = t;
      }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (int b = 0; b < kBins; ++b) {
      if (bin_max[b] <= 0.0) continue;
      const double x = std::log(bin_t[b]);
      const double y = std::log(bin_max[b]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++used;
    }
    double slope = -INFINITY;  // nothing above the floor: the grid vanishes
    if (used >= 2) {
      slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
    }
    report.tail_slopes[i] = slope;
    report.admissible = report.admissible && slope <= kTailSlopeThreshold;
  }
  return report;
}

double truncation_tail(const Pulse& p, int J, int horizon) {
  if (J < 0 || horizon <= J) {
    throw DomainError("truncation_tail: need 0 <= J < horizon");
  }
  const double scale = 1.0 / std::sqrt(2.0 * p.W());
  double worst = 0.0;
  for (double tau : {0.5, 1.0, 1.5}) {
    double sum = 0.0;
    for (int d = J + 1; d <= horizon; ++d) {
      // Symbols at l = 1 + d and l = 1 - d.
      sum += std::abs(p.value_normalized(tau - 1.0 - d)) + std::abs(p.value_normalized(tau - 1.0 + d));
    }
    worst = std::max(worst, sum * scale);
  }
  return worst;
}

}  // namespace onebit::waveform
