#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <thread>
#include <random>
#include <sstream>

#include "onebit/bound.hpp"
#include "onebit/cli.hpp"
#include "onebit/contour.hpp"
#include "onebit/errors.hpp"
#include "onebit/expansion.hpp"
#include "onebit/gaussmath.hpp"
#include "onebit/simulate.hpp"
#include "onebit/waveform.hpp"

#ifndef ONEBIT_VERSION
#define ONEBIT_VERSION "dev"
#endif

namespace onebit::cli {

namespace {

using json = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string pattern_string(int index) {
  const auto s = bound::pattern_from_index(index);
  std::string out;
  for (int v : s) out += v > 0 ? '+' : '-';
  return out;
}

// Where a subcommand's output goes, plus the provenance it carries.
struct Output {
  std::string path;
  std::string format;
  std::string command;
  std::string config_hash;

  void write(std::ostream& fallback, const std::string& body) const {
    if (path.empty() || path == "-") {
      fallback << body;
      return;
    }
    std::ofstream file(path);
    if (!file) throw DomainError("cannot write output file '" + path + "'");
    file << body;
  }

  std::string csv_header() const {
    return std::string("# onebit ") + ONEBIT_VERSION + "\n# command " + command +
           "\n# config_hash " + config_hash + "\n";
  }

  json provenance() const {
    return {{"version", ONEBIT_VERSION}, {"command", command}, {"config_hash", config_hash}};
  }

  bool as_json() const { return format == "json"; }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

// ---------------------------------------------------------------- orthant

struct OrthantArgs {
  std::optional<double> rho;
  std::optional<std::string> k;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
};

gaussmath::Corr3 parse_corr3(const std::string& text) {
  if (text == "paper" || text == "double-rate") return gaussmath::Corr3::double_rate();
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("--k expects 'double-rate' or rho12,rho13,rho23");
    }
  }
  if (v.size() != 3) throw DomainError("--k expects 'double-rate' or rho12,rho13,rho23");
  return gaussmath::Corr3(v[0], v[1], v[2]);
}

int cmd_orthant(const OrthantArgs& a, const Output& o, std::ostream& out) {
  if (!a.rho && !a.k) throw DomainError("orthant: give --rho and/or --k");
  const QuadratureSettings q{a.abs_tol, a.rel_tol, 200};
  json rows = json::array();
  std::string csv = o.csv_header() + "kind,rho12,rho13,rho23,closed_form,quadrature,delta\n";
  if (a.rho) {
    const gaussmath::Corr2 c(*a.rho);
    const double closed = gaussmath::orthant2(c);
    const double quad = gaussmath::ccdf2_exact(c, 0.0, 0.0, q);
    rows.push_back({{"kind", "bivariate"}, {"rho", c.rho()}, {"closed_form", closed},
                    {"quadrature", quad}, {"delta", std::abs(closed - quad)}});
    csv += "bivariate," + fmt(c.rho()) + ",,," + fmt(closed) + "," + fmt(quad) + "," +
           fmt(std::abs(closed - quad)) + "\n";
  }
  if (a.k) {
    const gaussmath::Corr3 c = parse_corr3(*a.k);
    const double closed = gaussmath::orthant3(c);
    const double quad = gaussmath::ccdf3_exact(c, 0.0, 0.0, 0.0, q);
    rows.push_back({{"kind", "trivariate"},
                    {"rho12", c.rho12()},
                    {"rho13", c.rho13()},
                    {"rho23", c.rho23()},
                    {"closed_form", closed},
                    {"quadrature", quad},
                    {"delta", std::abs(closed - quad)}});
    csv += "trivariate," + fmt(c.rho12()) + "," + fmt(c.rho13()) + "," + fmt(c.rho23()) + "," +
           fmt(closed) + "," + fmt(quad) + "," + fmt(std::abs(closed - quad)) + "\n";
  }
  if (o.as_json()) {
    o.write(out, json{{"provenance", o.provenance()}, {"rows", rows}}.dump(2) + "\n");
  } else {
    o.write(out, csv);
  }
  return kExitOk;
}

// ---------------------------------------------------------- verify-prop

struct VerifyArgs {
  long long draws = 10000;
  double max_A = 0.5;
  double max_offset = 2.0;
  double max_rho = 0.95;
  double min_det = 1e-3;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  double slack = 1e-9;
};

struct DrawOutcome {
  double delta = 0.0;
  double envelope = 0.0;
  bool violated = false;
};

int cmd_verify_prop(const VerifyArgs& a, const Output& o, std::ostream& out) {
  if (a.draws < 1) throw DomainError("verify-prop: --draws must be >= 1");
  if (!(a.max_A >= 0.0) || !(a.max_offset >= 0.0) || !(a.max_rho >= 0.0 && a.max_rho < 1.0)) {
    throw DomainError("verify-prop: need max-A >= 0, max-offset >= 0, 0 <= max-rho < 1");
  }
  const auto n = static_cast<std::size_t>(a.draws);

  // Parameters are drawn serially so the sweep is independent of --threads.
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  struct Draw {
    double r12, r13, r23, A, alpha, beta, gamma;
  };
  std::vector<Draw> bivariate(n);
  std::vector<Draw> trivariate(n);
  for (auto& d : bivariate) {
    d = {a.max_rho * unit(rng), 0, 0, a.max_A * 0.5 * (unit(rng) + 1.0), a.max_offset * unit(rng),
         a.max_offset * unit(rng), 0};
  }
  for (auto& d : trivariate) {
    for (;;) {
      d.r12 = a.max_rho * unit(rng);
      d.r13 = a.max_rho * unit(rng);
      d.r23 = a.max_rho * unit(rng);
      const double det = 1 - d.r12 * d.r12 - d.r13 * d.r13 - d.r23 * d.r23 + 2 * d.r12 * d.r13 * d.r23;
      if (det >= a.min_det) break;
    }
    d.A = a.max_A * 0.5 * (unit(rng) + 1.0);
    d.alpha = a.max_offset * unit(rng);
    d.beta = a.max_offset * unit(rng);
    d.gamma = a.max_offset * unit(rng);
  }

  const QuadratureSettings q{};
  auto judge = [&](double exact, const expansion::ExpansionResult& e) {
    DrawOutcome r;
    r.delta = std::abs(exact - e.approx);
    r.envelope = e.envelope;
    r.violated = r.delta > e.envelope * (1.0 + 1e-6) + a.slack;
    return r;
  };
  auto run_sweep = [&](auto&& evaluate, std::size_t count) {
    std::vector<DrawOutcome> results(count);
    const unsigned workers = std::max(1u, a.threads);
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) results[i] = evaluate(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
  };

  const auto biv = run_sweep(
      [&](std::size_t i) {
        const Draw& d = bivariate[i];
        const gaussmath::Corr2 c(d.r12);
        const auto e = expansion::expand_ccdf2(c, {d.A, d.alpha, d.beta, {}});
        return judge(gaussmath::ccdf2_exact(c, d.alpha * d.A, d.beta * d.A, q), e);
      },
      n);
  const auto tri = run_sweep(
      [&](std::size_t i) {
        const Draw& d = trivariate[i];
        const gaussmath::Corr3 c(d.r12, d.r13, d.r23);
        const auto e = expansion::expand_ccdf3(c, {d.A, d.alpha, d.beta, d.gamma});
        return judge(gaussmath::ccdf3_exact(c, d.alpha * d.A, d.beta * d.A, d.gamma * d.A, q), e);
      },
      n);

  auto summarize = [&](const std::vector<DrawOutcome>& results, const std::vector<Draw>& draws,
                       bool three) {
    double max_ratio = 0.0;
    double max_delta = 0.0;
    json offending = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      max_delta = std::max(max_delta, r.delta);
      if (r.envelope > 0.0) max_ratio = std::max(max_ratio, r.delta / r.envelope);
      if (r.violated) {
        const Draw& d = draws[i];
        json item{{"index", i}, {"A", d.A}, {"alpha", d.alpha}, {"beta", d.beta},
                  {"delta", r.delta}, {"envelope", r.envelope}};
        if (three) {
          item["gamma"] = d.gamma;
          item["rho"] = {d.r12, d.r13, d.r23};
        } else {
          item["rho"] = d.r12;
        }
        offending.push_back(item);
      }
    }
    return json{{"draws", results.size()},
                {"max_ratio", max_ratio},
                {"max_delta", max_delta},
                {"violations", offending.size()},
                {"offending", offending}};
  };

  json report{{"provenance", o.provenance()},
              {"seed", a.seed},
              {"bivariate", summarize(biv, bivariate, false)},
              {"trivariate", summarize(tri, trivariate, true)}};
  const bool ok = report["bivariate"]["violations"] == 0 && report["trivariate"]["violations"] == 0;
  report["passed"] = ok;

  if (o.as_json()) {
    o.write(out, report.dump(2) + "\n");
  } else {
    std::string csv = o.csv_header() + "family,draws,max_ratio,max_delta,violations\n";
    for (const char* fam : {"bivariate", "trivariate"}) {
      const auto& r = report[fam];
      csv += std::string(fam) + "," + r["draws"].dump() + "," + fmt(r["max_ratio"].get<double>()) +
             "," + fmt(r["max_delta"].get<double>()) + "," + r["violations"].dump() + "\n";
    }
    o.write(out, csv);
  }
  return ok ? kExitOk : kExitViolation;
}

// ----------------------------------------------------------------- bound

struct BoundArgs {
  std::optional<double> lambda;
  std::vector<double> features;
  double W = 1.0;
  double N0 = 1.0;
};

int cmd_bound(const BoundArgs& a, const Output& o, std::ostream& out) {
  const bool has_features = !a.features.empty();
  if (a.lambda.has_value() == has_features) {
    throw DomainError("bound: give exactly one of --lambda or --features");
  }
  const waveform::ChannelParams ch{a.W, a.N0, 0.0};
  ch.validate();
  waveform::Features f;
  if (a.lambda) {
    const auto b = waveform::boundary_point(*a.lambda, ch);
    f = {b.alpha0, b.beta0, b.alpha0};
  } else {
    if (a.features.size() != 3) {
      throw DomainError("bound: --features expects alpha0,beta0,gamma0");
    }
    f = {a.features[0], a.features[1], a.features[2]};
  }
  const auto br = bound::rate_breakdown(f, ch);
  const double unit = std::sqrt(ch.W * ch.N0);

  json report{{"provenance", o.provenance()}};
  if (a.lambda) report["lambda"] = *a.lambda;
  report["features"] = {{"alpha0", f.alpha0}, {"beta0", f.beta0}, {"gamma0", f.gamma0}};
  report["normalized"] = br.slope.normalized;
  report["value"] = br.slope.value;
  report["terms"] = br.terms;
  if (f.alpha0 == f.gamma0) {
    report["symmetric_form"] = bound::rate_symmetric_normalized(f.alpha0 * unit, f.beta0 * unit);
  }
  report["baselines"] = {{"unquantized", 1.0},
                         {"nyquist", bound::nyquist_slope(ch).normalized},
                         {"discrete_time_per_sigma2", 1.0 / gaussmath::kPi},
                         {"octal_quantizer_per_sigma2", bound::kOctalQuantizerSlope}};

  if (o.as_json()) {
    o.write(out, report.dump(2) + "\n");
  } else {
    std::string csv = o.csv_header() + "quantity,value\n";
    csv += "alpha0," + fmt(f.alpha0) + "\nbeta0," + fmt(f.beta0) + "\ngamma0," + fmt(f.gamma0) + "\n";
    csv += "normalized," + fmt(br.slope.normalized) + "\nvalue," + fmt(br.slope.value) + "\n";
    for (int i = 0; i < 4; ++i) csv += "term" + std::to_string(i + 1) + "," + fmt(br.terms[i]) + "\n";
    csv += "nyquist," + fmt(bound::nyquist_slope(ch).normalized) + "\n";
    o.write(out, csv);
  }
  return kExitOk;
}

// -------------------------------------------------------------- optimize

struct OptimizeArgs {
  double lo = -5.0;
  double hi = 5.0;
  double tol = 1e-4;
};

int cmd_optimize(const OptimizeArgs& a, const Output& o, std::ostream& out, std::ostream& err) {
  if (!(a.lo < a.hi)) {
    err << "optimize: degenerate bracket [" << a.lo << ", " << a.hi << "]\n";
    return kExitViolation;
  }
  const auto r = bound::optimize_lambda(a.lo, a.hi, a.tol);
  if (r.at_endpoint) {
    err << "warning: maximum at bracket endpoint " << r.lambda_star << "\n";
  }
  json report{{"provenance", o.provenance()},
              {"lo", a.lo},
              {"hi", a.hi},
              {"tol", a.tol},
              {"lambda_star", r.lambda_star},
              {"value", r.value},
              {"iterations", r.iterations},
              {"at_endpoint", r.at_endpoint}};
  if (o.as_json()) {
    o.write(out, report.dump(2) + "\n");
  } else {
    o.write(out, o.csv_header() + "lambda_star,value,iterations,at_endpoint\n" + fmt(r.lambda_star) +
                     "," + fmt(r.value) + "," + std::to_string(r.iterations) + "," +
                     (r.at_endpoint ? "true" : "false") + "\n");
  }
  return kExitOk;
}

// --------------------------------------------------------------- figure2

struct FigureArgs {
  int points = 1001;
  int resolution = 240;
  double level = 0.7465;
  double extent = 1.2;
  double lambda_min = -5.0;
  double lambda_max = 5.0;
  double tolerance = 1e-3;
  std::string boundary_out = "figure2_boundary.csv";
  std::string contour_out = "figure2_contour.csv";
};

int cmd_figure2(const FigureArgs& a, const Output& o, std::ostream& out, std::ostream& err) {
  if (a.resolution < 16) throw DomainError("figure2: --resolution must be >= 16");
  if (a.points < 2 || !(a.lambda_min < a.lambda_max)) {
    throw DomainError("figure2: need --points >= 2 and lambda-min < lambda-max");
  }
  const waveform::ChannelParams ch{};
  std::ostringstream boundary;
  boundary << o.csv_header() << "lambda,alpha0,beta0,rdot\n" << std::setprecision(12);
  double best = -1.0;
  double best_lambda = 0.0;
  for (int i = 0; i < a.points; ++i) {
    const double lambda = a.lambda_min + (a.lambda_max - a.lambda_min) * i / (a.points - 1);
    const auto b = waveform::boundary_point(lambda, ch);
    const double rate = bound::rate_symmetric_normalized(b.alpha0, b.beta0);
    if (rate > best) {
      best = rate;
      best_lambda = lambda;
    }
    boundary << lambda << "," << b.alpha0 << "," << b.beta0 << "," << rate << "\n";
  }

  const auto segments = trace_contour(
      [](double x, double y) { return bound::rate_symmetric_normalized(x, y); },
      {-a.extent, a.extent, -a.extent, a.extent, a.resolution}, a.level);
  if (segments.empty()) {
    err << "figure2: no contour at level " << a.level << " inside the plotted window\n";
    return kExitNumeric;
  }
  std::ostringstream contour;
  contour << o.csv_header() << "segment,alpha0_start,beta0_start,alpha0_end,beta0_end\n"
          << std::setprecision(12);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    contour << i << "," << s.x0 << "," << s.y0 << "," << s.x1 << "," << s.y1 << "\n";
  }
  Output{a.boundary_out, "csv", o.command, o.config_hash}.write(out, boundary.str());
  Output{a.contour_out, "csv", o.command, o.config_hash}.write(out, contour.str());

  const double gap = std::abs(best - a.level);
  const double excess = best - a.level;
  const bool touches = gap <= a.tolerance && excess <= a.tolerance;
  json report{{"provenance", o.provenance()},
              {"level", a.level},
              {"max_rdot", best},
              {"lambda_at_max", best_lambda},
              {"gap", gap},
              {"segments", segments.size()},
              {"boundary_file", a.boundary_out},
              {"contour_file", a.contour_out},
              {"touches", touches}};
  if (o.as_json()) {
    o.write(out, report.dump(2) + "\n");
  } else {
    o.write(out, o.csv_header() + "level,max_rdot,lambda_at_max,gap,segments,touches\n" +
                     fmt(a.level) + "," + fmt(best) + "," + fmt(best_lambda) + "," + fmt(gap) + "," +
                     std::to_string(segments.size()) + "," + (touches ? "true" : "false") + "\n");
  }
  return touches ? kExitOk : kExitViolation;
}

// -------------------------------------------------------------- simulate

struct PulseArgs {
  std::optional<std::string> pulse;
  double lambda = 1.4;
  double xi = 0.25;
};

waveform::Pulse make_pulse(const PulseArgs& a, const std::string& fallback, double W) {
  const std::string family = a.pulse.value_or(fallback);
  if (family == "sinc") return waveform::Pulse::sinc(W);
  if (family == "optimal") return waveform::Pulse::optimal(a.lambda, W);
  if (family == "raised") return waveform::Pulse::raised(a.lambda, a.xi, W);
  throw DomainError("unknown pulse family '" + family + "'");
}

struct SimulateArgs {
  PulseArgs pulse;
  std::vector<double> powers;
  int J = 8;
  long long n = 1000000;
  std::uint64_t seed = 1;
  std::string sampling = "double";
  std::string mode = "both";
  double W = 1.0;
  double N0 = 1.0;
  unsigned threads = 1;
};

int cmd_simulate(const SimulateArgs& a, const Output& o, std::ostream& out) {
  const bool nyquist = a.sampling == "nyquist";
  const waveform::ChannelParams ch{a.W, a.N0, 0.0};
  ch.validate();
  if (a.n < 1) throw DomainError("simulate: --n must be >= 1");
  const auto pulse = make_pulse(a.pulse, nyquist ? "sinc" : "raised", ch.W);
  const std::vector<double> powers = a.powers.empty() ? simulate::default_power_grid() : a.powers;
  const bool exact = a.mode != "mc";
  const bool mc = a.mode != "exact";

  simulate::SimConfig cfg;
  cfg.ch = ch;
  cfg.pulse = pulse;
  cfg.J = a.J;
  cfg.n = static_cast<std::uint64_t>(a.n);
  cfg.seed = a.seed;
  cfg.sampling = nyquist ? simulate::Sampling::nyquist : simulate::Sampling::double_rate;
  cfg.threads = std::max(1u, a.threads);
  cfg.validate();

  std::ostringstream csv;
  csv << o.csv_header() << "# pulse " << pulse.describe() << "\n# J " << a.J << " truncation_tail "
      << waveform::truncation_tail(pulse, a.J) << "\n"
      << "record,P,x,pattern,value,stderr\n"
      << std::setprecision(12);
  json report{{"provenance", o.provenance()},
              {"pulse", pulse.describe()},
              {"J", a.J},
              {"sampling", a.sampling},
              {"points", json::array()}};

  std::vector<std::pair<double, double>> exact_points;
  std::vector<std::pair<double, double>> mc_points;
  for (double P : powers) {
    json point{{"P", P}};
    if (exact) {
      double mi = 0.0;
      json masses = json::object();
      if (nyquist) {
        const double p = simulate::exact_nyquist_law(P, pulse, ch, a.J);
        mi = bound::mutual_information_single(p);
        masses["+"] = p;
        masses["-"] = 1.0 - p;
        csv << "exact_mass," << P << ",+,+," << p << ",\n" << "exact_mass," << P << ",+,-," << 1.0 - p << ",\n";
      } else {
        const auto law = simulate::exact_truncated_law(P, pulse, ch, a.J, {}, cfg.threads);
        mi = bound::mutual_information(law);
        for (int s = 0; s < 8; ++s) {
          masses[pattern_string(s)] = law.conditional[s];
          csv << "exact_mass," << P << ",+," << pattern_string(s) << "," << law.conditional[s] << ",\n";
        }
      }
      point["exact_law"] = masses;
      point["mi_exact"] = mi;
      csv << "mi_exact," << P << ",,," << mi << ",\n";
      exact_points.emplace_back(P, 2.0 * ch.W * mi);
    }
    if (mc) {
      const auto joint = simulate::simulate_triples(cfg, P);
      const double mi = simulate::mi_plugin(joint);
      const double se = simulate::mi_plugin_stderr(joint);
      json counts = json::object();
      for (int x = 0; x < 2; ++x) {
        for (int s = 0; s < joint.outcomes(); ++s) {
          const std::string key = nyquist ? std::string(s == 0 ? "+" : "-") : pattern_string(s);
          counts[std::string(x == 0 ? "+" : "-") + "|" + key] = joint.counts[x][s];
          csv << "count," << P << "," << (x == 0 ? "+" : "-") << "," << key << ","
              << joint.counts[x][s] << ",\n";
        }
      }
      point["counts"] = counts;
      point["mi_plugin"] = mi;
      point["mi_plugin_stderr"] = se;
      csv << "mi_plugin," << P << ",,," << mi << "," << se << "\n";
      mc_points.emplace_back(P, 2.0 * ch.W * mi);
    }
    report["points"].push_back(point);
  }

  auto emit_slope = [&](const char* name, const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return;
    const auto fit = simulate::slope_estimate(pts);
    report[name] = {{"slope", fit.slope},
                    {"normalized", fit.slope * ch.N0},
                    {"stderr_normalized", fit.standard_error * ch.N0}};
    csv << name << ",,,," << fit.slope * ch.N0 << "," << fit.standard_error * ch.N0 << "\n";
  };
  emit_slope("slope_exact", exact_points);
  emit_slope("slope_plugin", mc_points);

  o.write(out, o.as_json() ? report.dump(2) + "\n" : csv.str());
  return kExitOk;
}

// ------------------------------------------------------------------ taps

struct TapsArgs {
  PulseArgs pulse;
  int L = 64;
  double W = 1.0;
  int tail_J = 8;
};

int cmd_taps(const TapsArgs& a, const Output& o, std::ostream& out) {
  const auto pulse = make_pulse(a.pulse, "raised", a.W);
  const auto taps = pulse.quarter_taps(a.L);
  std::ostringstream csv;
  csv << o.csv_header() << "# pulse " << pulse.describe() << "\n# truncation_tail J=" << a.tail_J
      << " " << waveform::truncation_tail(pulse, a.tail_J) << "\nl,t,g\n"
      << std::setprecision(15);
  json rows = json::array();
  for (int k = -a.L; k <= a.L; ++k) {
    const double t = k / (4.0 * a.W);
    const double g = taps[static_cast<std::size_t>(k + a.L)];
    csv << k << "," << t << "," << g << "\n";
    rows.push_back({k, t, g});
  }
  o.write(out, o.as_json() ? json{{"provenance", o.provenance()}, {"pulse", pulse.describe()},
                                  {"taps", rows}}
                                     .dump(2) + "\n"
                           : csv.str());
  return kExitOk;
}

void add_pulse_options(CLI::App* sub, PulseArgs& p) {
  sub->add_option("--pulse", p.pulse, "Pulse family")->check(CLI::IsMember({"sinc", "optimal", "raised"}));
  sub->add_option("--lambda", p.lambda, "Weight of the half-shifted sinc pair")->capture_default_str();
  sub->add_option("--xi", p.xi, "Raised-cosine roll-off in (0, 1]")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacity per unit-cost of the one-bit quantized bandlimited Gaussian channel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ONEBIT_VERSION);

  Output output;

  OrthantArgs orthant;
  auto* s_orthant = app.add_subcommand("orthant", "Closed-form orthant probabilities vs quadrature");
  s_orthant->add_option("--rho", orthant.rho, "Bivariate correlation");
  s_orthant->add_option("--k", orthant.k, "'double-rate' or rho12,rho13,rho23");
  s_orthant->add_option("--abs-tol", orthant.abs_tol)->capture_default_str();
  s_orthant->add_option("--rel-tol", orthant.rel_tol)->capture_default_str();

  VerifyArgs verify;
  auto* s_verify = app.add_subcommand("verify-prop", "Remainder-envelope soundness sweep");
  s_verify->add_option("--draws", verify.draws)->capture_default_str();
  s_verify->add_option("--max-A", verify.max_A)->capture_default_str();
  s_verify->add_option("--max-offset", verify.max_offset)->capture_default_str();
  s_verify->add_option("--max-rho", verify.max_rho)->capture_default_str();
  s_verify->add_option("--min-det", verify.min_det)->capture_default_str();
  s_verify->add_option("--seed", verify.seed)->capture_default_str();
  s_verify->add_option("--threads", verify.threads)->capture_default_str();

  BoundArgs bnd;
  auto* s_bound = app.add_subcommand("bound", "Rate per unit-cost for a boundary point or features");
  s_bound->add_option("--lambda", bnd.lambda, "Boundary parameter");
  s_bound->add_option("--features", bnd.features, "alpha0,beta0,gamma0")->delimiter(',');
  s_bound->add_option("--W", bnd.W)->capture_default_str();
  s_bound->add_option("--N0", bnd.N0)->capture_default_str();

  OptimizeArgs opt;
  auto* s_opt = app.add_subcommand("optimize", "Maximize the rate along the boundary");
  s_opt->add_option("--lo", opt.lo)->capture_default_str();
  s_opt->add_option("--hi", opt.hi)->capture_default_str();
  s_opt->add_option("--tol", opt.tol)->capture_default_str();

  FigureArgs fig;
  auto* s_fig = app.add_subcommand("figure2", "Boundary curve and rate contour data");
  s_fig->add_option("--points", fig.points, "Lambda grid size")->capture_default_str();
  s_fig->add_option("--resolution", fig.resolution, "Contour cells per axis")->capture_default_str();
  s_fig->add_option("--level", fig.level)->capture_default_str();
  s_fig->add_option("--extent", fig.extent)->capture_default_str();
  s_fig->add_option("--lambda-min", fig.lambda_min)->capture_default_str();
  s_fig->add_option("--lambda-max", fig.lambda_max)->capture_default_str();
  s_fig->add_option("--tolerance", fig.tolerance)->capture_default_str();
  s_fig->add_option("--boundary-out", fig.boundary_out)->capture_default_str();
  s_fig->add_option("--contour-out", fig.contour_out)->capture_default_str();

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Exact truncated law and Monte Carlo estimates");
  add_pulse_options(s_sim, sim.pulse);
  s_sim->add_option("--P", sim.powers, "Power grid (comma separated)")->delimiter(',');
  s_sim->add_option("--J", sim.J, "ISI half-width")->capture_default_str();
  s_sim->add_option("--n", sim.n, "Monte Carlo trials per power")->capture_default_str();
  s_sim->add_option("--seed", sim.seed)->capture_default_str();
  s_sim->add_option("--sampling", sim.sampling)
      ->check(CLI::IsMember({"double", "nyquist"}))
      ->capture_default_str();
  s_sim->add_option("--mode", sim.mode)->check(CLI::IsMember({"exact", "mc", "both"}))->capture_default_str();
  s_sim->add_option("--W", sim.W)->capture_default_str();
  s_sim->add_option("--N0", sim.N0)->capture_default_str();
  s_sim->add_option("--threads", sim.threads)->capture_default_str();

  TapsArgs taps;
  auto* s_taps = app.add_subcommand("taps", "Export pulse samples on the quarter-Nyquist grid");
  add_pulse_options(s_taps, taps.pulse);
  s_taps->add_option("--L", taps.L, "Half-width in quarter-grid slots")->capture_default_str();
  s_taps->add_option("--W", taps.W)->capture_default_str();
  s_taps->add_option("--tail-J", taps.tail_J)->capture_default_str();

  const std::vector<std::pair<CLI::App*, std::string>> formats{
      {s_orthant, "csv"}, {s_verify, "json"}, {s_bound, "json"}, {s_opt, "json"},
      {s_fig, "csv"},     {s_sim, "csv"},     {s_taps, "csv"}};
  // Every subcommand writes into the same Output; only the selected one parses,
  // so its default format is filled in afterwards.
  for (const auto& [sub, fmt_default] : formats) {
    sub->add_option("--out", output.path, "Output path (stdout when omitted)");
    sub->add_option("--format", output.format, "Output format (default " + fmt_default + ")")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  std::vector<std::string> resolved;
  try {
    const char* env = std::getenv(kConfigEnvVar);
    resolved = resolve_arguments(args, env ? std::optional<std::string>(env) : std::nullopt);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<std::string> reversed(resolved.rbegin(), resolved.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  output.command = chosen->get_name();
  if (output.format.empty()) {
    for (const auto& [sub, fmt_default] : formats) {
      if (sub == chosen) output.format = fmt_default;
    }
  }
  output.config_hash = hex64(fnv1a(chosen->config_to_str(true, false)));

  try {
    if (chosen == s_orthant) return cmd_orthant(orthant, output, out);
    if (chosen == s_verify) return cmd_verify_prop(verify, output, out);
    if (chosen == s_bound) return cmd_bound(bnd, output, out);
    if (chosen == s_opt) return cmd_optimize(opt, output, out, err);
    if (chosen == s_fig) return cmd_figure2(fig, output, out, err);
    if (chosen == s_sim) return cmd_simulate(sim, output, out);
    if (chosen == s_taps) return cmd_taps(taps, output, out);
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << " (error estimate " << e.error_estimate() << ")\n";
    return kExitNumeric;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace onebit::cli
