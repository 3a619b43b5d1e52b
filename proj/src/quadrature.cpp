#include "onebit/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace onebit {

void QuadratureSettings::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1) {
    throw DomainError("QuadratureSettings: abs_tol, rel_tol must be > 0 and max_subdivisions >= 1");
  }
}

namespace detail {

namespace {

KronrodRule build_kronrod21() {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& kx = gauss_kronrod<double, 21>::abscissa();
  const auto& kw = gauss_kronrod<double, 21>::weights();
  const auto& gx = gauss<double, 10>::abscissa();
  const auto& gw = gauss<double, 10>::weights();

  KronrodRule rule{};
  for (std::size_t i = 0; i < 11; ++i) {
    rule.nodes[i] = kx[i];
    rule.kronrod_weight[i] = kw[i];
    for (std::size_t j = 0; j < gx.size(); ++j) {
      if (std::abs(gx[j] - kx[i]) < 1e-14) {
        rule.gauss_weight[i] = gw[j];
      }
    }
  }
  return rule;
}

}  // namespace

const KronrodRule& kronrod21() {
  static const KronrodRule rule = build_kronrod21();
  return rule;
}

}  // namespace detail
}  // namespace onebit
