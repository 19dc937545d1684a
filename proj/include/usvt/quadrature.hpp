#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "usvt/error.hpp"

namespace usvt::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Rule gauss_legendre(int order) {
  detail::require(order >= 1, "gauss_legendre: order must be >= 1");
  Rule rule{std::vector<double>(order), std::vector<double>(order)};
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double derivative = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      // three-term recurrence for P_order(z) and P_{order-1}(z)
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      derivative = order * (z * p1 - p2) / (z * z - 1.0);
      const double previous = z;
      z = previous - p1 / derivative;
      if (std::abs(z - previous) <= 1e-15)
        break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(order - 1 - i)] = z;
    const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  return rule;
}

/// Composite Simpson rule on [a, b] with an even number of intervals.
template <typename F> double simpson(F &&f, double a, double b, int intervals) {
  detail::require(intervals >= 2 && intervals % 2 == 0, "simpson: need an even number of intervals");
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

/// Simpson weights for `intervals` subintervals of [a, b] (intervals + 1 nodes).
inline std::vector<double> simpson_weights(double a, double b, int intervals) {
  detail::require(intervals >= 2 && intervals % 2 == 0, "simpson: need an even number of intervals");
  const double h = (b - a) / intervals;
  std::vector<double> w(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i)
    w[static_cast<std::size_t>(i)] = (i == 0 || i == intervals ? 1.0 : (i % 2 ? 4.0 : 2.0)) * h / 3.0;
  return w;
}

} // namespace usvt::quad
