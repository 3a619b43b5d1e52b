#include "onebit/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "onebit/errors.hpp"
#include "onebit/gaussmath.hpp"

namespace onebit::simulate {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
  return splitmix64(splitmix64(seed) ^ splitmix64(chunk + 0x632BE59BD9B4E019ull));
}

// Runs work(chunk) for chunk = 0..chunks-1 on up to `threads` workers. Results
// land in per-chunk slots, so the caller's in-order reduction does not depend
// on scheduling.
template <class Result, class Work>
std::vector<Result> run_chunks(std::size_t chunks, unsigned threads, Work&& work) {
  std::vector<Result> results(chunks);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) results[c] = work(c);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks && !failed; c = next++) {
        try {
          results[c] = work(c);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

void require_half_width(int J) {
  if (J < 0) {
    throw DomainError("ISI half-width J must be >= 0");
  }
  if (J > kMaxEnumerationHalfWidth) {
    throw ResourceError("exact enumeration supports J <= " +
                        std::to_string(kMaxEnumerationHalfWidth) + ", got " + std::to_string(J));
  }
}

void require_power(double P) {
  if (!std::isfinite(P) || !(P >= 0.0)) {
    throw DomainError("power P must be finite and >= 0");
  }
}

// Swap of bit 2 (Y_{1/2}) and bit 0 (Y_{3/2}) in a pattern index.
int reversed(int index) { return (index & 2) | ((index & 1) << 2) | ((index >> 2) & 1); }

double xlogx_ratio(double joint, double denom) {
  return joint > 0.0 ? joint * std::log(joint / denom) : 0.0;
}

}  // namespace

void SimConfig::validate() const {
  ch.validate();
  if (J < 0) throw DomainError("SimConfig: J must be >= 0");
  if (n < 1) throw DomainError("SimConfig: n must be >= 1");
  if (std::abs(pulse.W() - ch.W) > 1e-12 * ch.W) {
    throw DomainError("SimConfig: pulse bandwidth differs from channel bandwidth");
  }
  if (!std::isfinite(sample_bias)) throw DomainError("SimConfig: sample_bias must be finite");
}

void EmpiricalJoint::merge(const EmpiricalJoint& other) {
  for (int x = 0; x < 2; ++x) {
    for (int s = 0; s < 8; ++s) counts[x][s] += other.counts[x][s];
  }
  total += other.total;
}

IsiTaps isi_taps(const Pulse& pulse, const ChannelParams& ch, int J) {
  ch.validate();
  if (J < 0) throw DomainError("isi_taps: J must be >= 0");
  if (std::abs(pulse.W() - ch.W) > 1e-12 * ch.W) {
    throw DomainError("isi_taps: pulse bandwidth differs from channel bandwidth");
  }
  // Quarter grid index k = 2 (tau - l) for tau in {1/2, 1, 3/2}.
  const int L = 2 * J + 3;
  const auto taps = pulse.quarter_taps(L);
  const double scale = 1.0 / std::sqrt(2.0 * ch.W * ch.W * ch.N0);
  auto offset = [&](int symbol) {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
      const int k = (i + 1) - 2 * symbol;  // 2 tau = 1, 2, 3
      out[i] = taps[static_cast<std::size_t>(k + L)] * scale;
    }
    return out;
  };
  IsiTaps result;
  result.own = offset(1);
  for (int d = 1; d <= J; ++d) result.neighbors.push_back(offset(1 + d));
  for (int d = 1; d <= J; ++d) result.neighbors.push_back(offset(1 - d));
  return result;
}

TripleLaw exact_truncated_law(double P, const Pulse& pulse, const ChannelParams& ch, int J,
                              const QuadratureSettings& q, unsigned threads) {
  require_power(P);
  require_half_width(J);
  q.validate();
  const IsiTaps taps = isi_taps(pulse, ch, J);
  const gaussmath::Corr3 K = gaussmath::Corr3::double_rate();
  const double amp = std::sqrt(P);
  const std::uint64_t patterns = 1ull << (2 * J);
  const std::uint64_t half_mask = (1ull << J) - 1;

  // Every family here is even in time, so the mirrored neighbor pattern
  // yields the mirrored sample triple; only one of each pair is evaluated.
  auto mirror = [&](std::uint64_t m) { return (m >> J) | ((m & half_mask) << J); };

  constexpr std::uint64_t kChunk = 1024;
  const std::size_t chunks = static_cast<std::size_t>((patterns + kChunk - 1) / kChunk);
  using Partial = std::array<double, 8>;
  auto work = [&](std::size_t c) {
    Partial sum{};
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(patterns, begin + kChunk);
    for (std::uint64_t m = begin; m < end; ++m) {
      const std::uint64_t mm = mirror(m);
      if (mm < m) continue;
      std::array<double, 3> off = taps.own;
      for (int b = 0; b < 2 * J; ++b) {
        const double sign = (m >> b) & 1 ? -1.0 : 1.0;
        for (int i = 0; i < 3; ++i) off[i] += sign * taps.neighbors[b][i];
      }
      const auto masses = gaussmath::orthant_masses3(K, amp * off[0], amp * off[1], amp * off[2], q);
      for (int s = 0; s < 8; ++s) {
        sum[s] += masses[s];
        if (mm != m) sum[reversed(s)] += masses[s];
      }
    }
    return sum;
  };

  const auto partials = run_chunks<Partial>(chunks, threads, work);
  std::array<double, 8> total{};
  for (const auto& p : partials) {
    for (int s = 0; s < 8; ++s) total[s] += p[s];
  }
  for (double& t : total) t /= static_cast<double>(patterns);
  return bound::from_conditional(total);
}

double exact_nyquist_law(double P, const Pulse& pulse, const ChannelParams& ch, int J) {
  require_power(P);
  require_half_width(J);
  const IsiTaps taps = isi_taps(pulse, ch, J);
  const double amp = std::sqrt(P);
  const std::uint64_t patterns = 1ull << (2 * J);
  double sum = 0.0;
  for (std::uint64_t m = 0; m < patterns; ++m) {
    double off = taps.own[1];
    for (int b = 0; b < 2 * J; ++b) {
      off += ((m >> b) & 1 ? -1.0 : 1.0) * taps.neighbors[b][1];
    }
    sum += 1.0 - gaussmath::q_function(amp * off);
  }
  return sum / static_cast<double>(patterns);
}

EmpiricalJoint simulate_triples(const SimConfig& cfg, double P) {
  cfg.validate();
  require_power(P);
  if (cfg.J > 31) {
    throw ResourceError("simulate_triples: J must be <= 31");
  }
  const IsiTaps taps = isi_taps(cfg.pulse, cfg.ch, cfg.J);
  const std::array<double, 3> own = taps.own;
  const std::vector<std::array<double, 3>> neighbors = taps.neighbors;
  const gaussmath::Corr3 K = gaussmath::Corr3::double_rate();
  const double amp = std::sqrt(P);
  const int width = 2 * cfg.J;
  const bool nyquist = cfg.sampling == Sampling::nyquist;
  const double bias = cfg.sample_bias;

  const std::size_t chunks = static_cast<std::size_t>((cfg.n + kChunkTrials - 1) / kChunkTrials);
  auto work = [&](std::size_t c) {
    EmpiricalJoint tally;
    tally.sampling = cfg.sampling;
    const std::uint64_t begin = c * kChunkTrials;
    const std::uint64_t trials = std::min<std::uint64_t>(kChunkTrials, cfg.n - begin);
    std::mt19937_64 rng(chunk_seed(cfg.seed, c));
    gaussmath::Mvn3Sampler noise(K);
    std::normal_distribution<double> scalar_noise(0.0, 1.0);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const std::uint64_t bits = rng();
      const int x = static_cast<int>(bits >> 63);  // 1 means X_1 = -sqrt(P)
      const double own_sign = x ? -1.0 : 1.0;
      std::array<double, 3> clean{own_sign * own[0], own_sign * own[1], own_sign * own[2]};
      for (int b = 0; b < width; ++b) {
        const double sign = (bits >> b) & 1 ? -1.0 : 1.0;
        const auto& g = neighbors[static_cast<std::size_t>(b)];
        clean[0] += sign * g[0];
        clean[1] += sign * g[1];
        clean[2] += sign * g[2];
      }
      // Noise is drawn in standardized units; offsets are already divided by sqrt(W N0).
      int outcome = 0;
      if (nyquist) {
        const double y = amp * clean[1] + bias + scalar_noise(rng);
        outcome = y >= 0.0 ? 0 : 1;
      } else {
        const auto z = noise(rng);
        for (int i = 0; i < 3; ++i) {
          const double y = amp * clean[i] + bias + z[static_cast<std::size_t>(i)];
          outcome = (outcome << 1) | (y >= 0.0 ? 0 : 1);
        }
      }
      ++tally.counts[x][outcome];
    }
    tally.total = trials;
    return tally;
  };

  const auto partials = run_chunks<EmpiricalJoint>(chunks, cfg.threads, work);
  EmpiricalJoint joint;
  joint.sampling = cfg.sampling;
  for (const auto& p : partials) joint.merge(p);
  return joint;
}

double mi_plugin(const EmpiricalJoint& j) {
  if (j.total < 1) throw DomainError("mi_plugin: empty table");
  const double n = static_cast<double>(j.total);
  std::array<double, 2> px{};
  std::array<double, 8> ps{};
  for (int x = 0; x < 2; ++x) {
    for (int s = 0; s < 8; ++s) {
      px[x] += j.counts[x][s] / n;
      ps[s] += j.counts[x][s] / n;
    }
  }
  double mi = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int s = 0; s < 8; ++s) {
      mi += xlogx_ratio(j.counts[x][s] / n, px[x] * ps[s]);
    }
  }
  return mi;
}

double mi_plugin_stderr(const EmpiricalJoint& j) {
  if (j.total < 2) throw DomainError("mi_plugin_stderr: need at least two trials");
  const double n = static_cast<double>(j.total);
  std::array<double, 2> px{};
  std::array<double, 8> ps{};
  for (int x = 0; x < 2; ++x) {
    for (int s = 0; s < 8; ++s) {
      px[x] += j.counts[x][s] / n;
      ps[s] += j.counts[x][s] / n;
    }
  }
  double first = 0.0;
  double second = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int s = 0; s < 8; ++s) {
      const double p = j.counts[x][s] / n;
      if (p <= 0.0) continue;
      const double l = std::log(p / (px[x] * ps[s]));
      first += p * l;
      second += p * l * l;
    }
  }
  return std::sqrt(std::max(0.0, second - first * first) / n);
}

SlopeFit slope_estimate(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw DomainError("slope_estimate: need at least two points");
  double spp = 0.0;
  double spm = 0.0;
  for (const auto& [p, m] : points) {
    if (!(p > 0.0) || !std::isfinite(p) || !std::isfinite(m)) {
      throw DomainError("slope_estimate: powers must be > 0 and values finite");
    }
    spp += p * p;
    spm += p * m;
  }
  bool all_equal = true;
  for (const auto& pt : points) all_equal = all_equal && pt.first == points.front().first;
  if (all_equal) throw DomainError("slope_estimate: all powers are equal");

  SlopeFit fit;
  fit.slope = spm / spp;
  double rss = 0.0;
  for (const auto& [p, m] : points) {
    const double r = m - fit.slope * p;
    rss += r * r;
  }
  fit.standard_error = std::sqrt(rss / static_cast<double>(points.size() - 1) / spp);
  return fit;
}

std::vector<double> default_power_grid() { return {1e-5, 2e-5, 5e-5, 1e-4}; }

ExactSlopeReport exact_slope(std::span<const double> powers, const Pulse& pulse,
                             const ChannelParams& ch, int J, Sampling sampling,
                             const QuadratureSettings& q, unsigned threads) {
  ExactSlopeReport report;
  for (double P : powers) {
    double mi = 0.0;
    if (sampling == Sampling::nyquist) {
      mi = bound::mutual_information_single(exact_nyquist_law(P, pulse, ch, J));
    } else {
      mi = bound::mutual_information(exact_truncated_law(P, pulse, ch, J, q, threads));
    }
    report.points.emplace_back(P, 2.0 * ch.W * mi);
  }
  report.fit = slope_estimate(report.points);
  return report;
}

}  // namespace onebit::simulate
