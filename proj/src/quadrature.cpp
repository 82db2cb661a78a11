#include "steklov/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace steklov {

GaussRule::GaussRule(int order) {
  if (order < 1) throw ConfigError("GaussRule: order must be positive");
  nodes.resize(order);
  weights.resize(order);
  const int n = order;
  // Newton iteration on P_n, symmetric pairs.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

const GaussRule& gauss_rule(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, GaussRule(order)).first;
  return it->second;
}

double integrate_to_tol(const std::function<double(double)>& fn, double a, double b,
                        double tol, int min_panels, int order) {
  const GaussRule& rule = gauss_rule(order);
  int panels = min_panels;
  double prev = rule.composite(fn, a, b, panels);
  for (int it = 0; it < 16; ++it) {
    panels *= 2;
    const double cur = rule.composite(fn, a, b, panels);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  return prev;
}

} // namespace steklov
