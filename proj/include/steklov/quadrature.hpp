#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "steklov/errors.hpp"

namespace steklov {

/// Gauss-Legendre rule on [-1, 1]. Nodes/weights are computed once per order
/// by Newton iteration on the Legendre polynomial and cached by the callers.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussRule(int order);

  /// Integrate fn over [a, b] with a single panel.
  template <typename F>
  double panel(F&& fn, double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q)
      sum += weights[q] * fn(mid + half * nodes[q]);
    return half * sum;
  }

  /// Composite rule with `panels` equal subintervals of [a, b].
  template <typename F>
  double composite(F&& fn, double a, double b, int panels) const {
    double sum = 0.0;
    const double dx = (b - a) / panels;
    for (int i = 0; i < panels; ++i) sum += panel(fn, a + i * dx, a + (i + 1) * dx);
    return sum;
  }
};

const GaussRule& gauss_rule(int order);

/// Composite Gauss-Legendre with panel doubling until two successive values
/// agree to `tol` (absolute). Starts from `min_panels`.
double integrate_to_tol(const std::function<double(double)>& fn, double a, double b,
                        double tol, int min_panels = 16, int order = 8);

/// Simpson value of |u|^p along an edge where u is linear between u0 and u1,
/// per unit of edge weight (i.e. the weighted integral is weight * this).
inline double simpson_abs_pow(double u0, double u1, double p) {
  const double um = 0.5 * (u0 + u1);
  return (std::pow(std::abs(u0), p) + 4.0 * std::pow(std::abs(um), p) +
          std::pow(std::abs(u1), p)) /
         6.0;
}

/// Simpson edge average of |u| (used for bathtub sorting and level-set masses).
inline double simpson_abs_avg(double u0, double u1) {
  return (std::abs(u0) + 4.0 * std::abs(0.5 * (u0 + u1)) + std::abs(u1)) / 6.0;
}

} // namespace steklov
