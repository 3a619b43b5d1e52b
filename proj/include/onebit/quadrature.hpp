#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "onebit/errors.hpp"

namespace onebit {

struct QuadratureSettings {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 200;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

namespace detail {

// 21-point Gauss-Kronrod rule: nodes[0] is the centre, nodes[1..10] the
// positive abscissae. gauss_weight is zero on Kronrod-only nodes.
struct KronrodRule {
  std::array<double, 11> nodes;
  std::array<double, 11> kronrod_weight;
  std::array<double, 11> gauss_weight;
};

const KronrodRule& kronrod21();

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
};

template <class F>
Panel evaluate_panel(F& f, double lo, double hi) {
  const KronrodRule& rule = kronrod21();
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<double, 21> fv{};
  fv[0] = f(centre);
  for (std::size_t i = 1; i < 11; ++i) {
    const double dx = half * rule.nodes[i];
    fv[2 * i - 1] = f(centre - dx);
    fv[2 * i] = f(centre + dx);
  }

  double kronrod = rule.kronrod_weight[0] * fv[0];
  double gauss = rule.gauss_weight[0] * fv[0];
  double absolute = std::abs(kronrod);
  for (std::size_t i = 1; i < 11; ++i) {
    const double pair = fv[2 * i - 1] + fv[2 * i];
    kronrod += rule.kronrod_weight[i] * pair;
    gauss += rule.gauss_weight[i] * pair;
    absolute += rule.kronrod_weight[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
  }

  // QUADPACK-style error scaling.
  const double mean = 0.5 * kronrod;
  double asc = rule.kronrod_weight[0] * std::abs(fv[0] - mean);
  for (std::size_t i = 1; i < 11; ++i) {
    asc += rule.kronrod_weight[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  }
  asc *= half;
  absolute *= half;

  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (absolute > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * absolute, err);
  }
  return {lo, hi, kronrod * half, err};
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over the finite interval [lo, hi].
// Bisects the panel with the largest error estimate until the total estimate
// drops below max(abs_tol, rel_tol * |value|). Throws NumericError carrying
// the achieved estimate when max_subdivisions is exhausted.
template <class F>
QuadratureResult integrate(F&& f, double lo, double hi, const QuadratureSettings& settings) {
  if (!(std::isfinite(lo) && std::isfinite(hi))) {
    throw DomainError("integrate: bounds must be finite");
  }
  if (lo == hi) {
    return {};
  }
  const double sign = hi < lo ? -1.0 : 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
  }

  std::vector<detail::Panel> panels;
  panels.reserve(static_cast<std::size_t>(settings.max_subdivisions) + 1);
  panels.push_back(detail::evaluate_panel(f, lo, hi));
  double value = panels.front().value;
  double error = panels.front().error;

  auto by_error = [](const detail::Panel& a, const detail::Panel& b) { return a.error < b.error; };
  int subdivisions = 1;
  while (error > std::max(settings.abs_tol, settings.rel_tol * std::abs(value))) {
    if (subdivisions >= settings.max_subdivisions) {
      throw NumericError("integrate: no convergence within max_subdivisions", error);
    }
    std::pop_heap(panels.begin(), panels.end(), by_error);
    const detail::Panel worst = panels.back();
    panels.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi)) {
      throw NumericError("integrate: panel width underflow", error);
    }
    const detail::Panel left = detail::evaluate_panel(f, worst.lo, mid);
    const detail::Panel right = detail::evaluate_panel(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push_back(left);
    std::push_heap(panels.begin(), panels.end(), by_error);
    panels.push_back(right);
    std::push_heap(panels.begin(), panels.end(), by_error);
    ++subdivisions;
  }

  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  for (const auto& p : panels) {
    value += p.value;
    error += p.error;
  }
  return {sign * value, error, subdivisions};
}

}  // namespace onebit
