#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bolax::quad {

/// Adaptive Gauss-Kronrod on a finite interval.
template <class F>
double finite(F&& f, double a, double b, double tol = 1e-13) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol);
}

/// Integral over [a, inf) by the exp-sinh rule.
template <class F>
double right_tail(F&& f, double a, double tol = 1e-13) {
  boost::math::quadrature::exp_sinh<double> rule;
  return rule.integrate([&](double t) { return f(a + t); }, 0.0,
                        std::numeric_limits<double>::infinity(), tol);
}

/// Integral over (-inf, a].
template <class F>
double left_tail(F&& f, double a, double tol = 1e-13) {
  boost::math::quadrature::exp_sinh<double> rule;
  return rule.integrate([&](double t) { return f(a - t); }, 0.0,
                        std::numeric_limits<double>::infinity(), tol);
}

/// Integral over the real line, split at the given points (peaks, kinks).
template <class F>
double whole_line(F&& f, std::vector<double> breaks, double tol = 1e-13) {
  if (breaks.empty()) breaks.push_back(0.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double s = left_tail(f, breaks.front(), tol) + right_tail(f, breaks.back(), tol);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) s += finite(f, breaks[k], breaks[k + 1], tol);
  return s;
}

}  // namespace bolax::quad
