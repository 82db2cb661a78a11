#include "steklov/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "steklov/quadrature.hpp"

namespace steklov {

namespace {

// C^1 cubic smoothstep, clamped.
double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

double smoothstep_deriv(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 6.0 * t * (1.0 - t);
}

} // namespace

PerturbationMap::PerturbationMap(const ChartFn& phi_, const OscillationSpec& osc_, double eps_)
    : phi(phi_), osc(osc_), eps(eps_) {
  if (!osc.is_zero()) checked_cell_count(eps);
  if (!(eps > 0.0) || eps >= 1.0) throw ConfigError("PerturbationMap: eps must lie in (0, 1)");
  cutoff_width = std::sqrt(eps);
}

double PerturbationMap::amplitude() const { return std::pow(eps, osc.a); }

double PerturbationMap::slope_scale() const { return std::pow(eps, osc.a - 1.0); }

double chart_distance(const PerturbationMap& map, const Eigen::Vector2d& x) {
  const double g = std::sqrt(1.0 + map.phi.deriv(x.x()) * map.phi.deriv(x.x()));
  return (map.phi(x.x()) - x.y()) / g;
}

Eigen::Vector2d chart_distance_grad(const PerturbationMap& map, const Eigen::Vector2d& x) {
  const double ps = map.phi.deriv(x.x());
  const double g = std::sqrt(1.0 + ps * ps);
  const double pss = map.phi.deriv2(x.x());
  const double d = (map.phi(x.x()) - x.y());
  const double dx = ps / g - d * ps * pss / (g * g * g);
  const double dy = -1.0 / g;
  return {dx, dy};
}

double cutoff_phi(const PerturbationMap& map, const Eigen::Vector2d& x) {
  const double d = chart_distance(map, x);
  if (d <= 0.0) return 1.0;
  return smoothstep(1.0 - d / map.cutoff_width);
}

Eigen::Vector2d cutoff_grad(const PerturbationMap& map, const Eigen::Vector2d& x) {
  const double d = chart_distance(map, x);
  if (d <= 0.0 || d >= map.cutoff_width) return Eigen::Vector2d::Zero();
  const double sp = smoothstep_deriv(1.0 - d / map.cutoff_width);
  return (-sp / map.cutoff_width) * chart_distance_grad(map, x);
}

Eigen::Vector2d apply_T_eps(const PerturbationMap& map, const Eigen::Vector2d& x) {
  if (map.osc.is_zero()) return x;
  const auto bundle = jacobian_at(map, x);
  if (bundle.DT.determinant() <= 0.0)
    throw MapError("T_eps is not orientation preserving at the evaluation point");
  const double c = map.amplitude() * map.osc.f(x.x() / map.eps);
  return {x.x(), x.y() - c * cutoff_phi(map, x)};
}

Eigen::Vector2d apply_T_eps_inverse(const PerturbationMap& map, const Eigen::Vector2d& y) {
  if (map.osc.is_zero()) return y;
  const double c = map.amplitude() * map.osc.f(y.x() / map.eps);
  if (c == 0.0) return y;
  // outside the cutoff support y is its own (exact) preimage
  if (cutoff_phi(map, y) == 0.0) return y;

  auto residual = [&](double x1) {
    return x1 - c * cutoff_phi(map, {y.x(), x1}) - y.y();
  };

  double lo = y.y(), hi = y.y() + c;
  if (c < 0.0) std::swap(lo, hi);
  double flo = residual(lo), fhi = residual(hi);
  // widen once: the cutoff can push the root slightly past y + c
  if (flo * fhi > 0.0) {
    const double pad = std::abs(c);
    lo -= pad;
    hi += pad;
    flo = residual(lo);
    fhi = residual(hi);
    if (flo * fhi > 0.0) throw MapError("apply_T_eps_inverse: no root in bracket");
  }

  double x1 = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = residual(x1);
    if (std::abs(r) < 1e-12) break;
    if (r > 0.0)
      hi = x1;
    else
      lo = x1;
    // Newton step with bisection safeguard
    const double dphi = cutoff_grad(map, {y.x(), x1}).y();
    const double dr = 1.0 - c * dphi;
    double next = (dr > 1e-12) ? x1 - r / dr : 0.5 * (lo + hi);
    if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
    x1 = next;
  }
  return {y.x(), x1};
}

JacobianBundle jacobian_at(const PerturbationMap& map, const Eigen::Vector2d& x) {
  JacobianBundle bundle;
  if (map.osc.is_zero()) return bundle;

  const double f = map.osc.f(x.x() / map.eps);
  const double fp = map.osc.fprime(x.x() / map.eps);
  const double phi_eps = cutoff_phi(map, x);
  const Eigen::Vector2d gphi = cutoff_grad(map, x);

  // DT = I - eps^a f A - eps^(a-1) phi B, with A and B of rank one acting on
  // the vertical component.
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  A(1, 0) = gphi.x();
  A(1, 1) = gphi.y();
  Eigen::Matrix2d B = Eigen::Matrix2d::Zero();
  B(1, 0) = fp;

  bundle.DT = Eigen::Matrix2d::Identity() - map.amplitude() * f * A - map.slope_scale() * phi_eps * B;
  bundle.J = std::abs(bundle.DT.determinant());

  // Tangential Jacobian when x sits on the perturbed chart.
  const double top = map.phi(x.x()) + map.amplitude() * f;
  if (std::abs(x.y() - top) <= 1e-9) {
    const double slope = map.phi.deriv(x.x()) + map.slope_scale() * fp;
    Eigen::Vector2d t(1.0, slope);
    t.normalize();
    bundle.Jtau = tangential_jacobian(bundle, t);
  }
  return bundle;
}

double tangential_jacobian(const JacobianBundle& bundle, const Eigen::Vector2d& tangent) {
  return (bundle.DT * tangent).norm();
}

double jtau_inverse_at_base_chart(const PerturbationMap& map, double x) {
  if (map.osc.is_zero()) return 1.0;
  const double ps = map.phi.deriv(x);
  const Eigen::Vector2d base(x, map.phi(x));
  const Eigen::Vector2d pre = apply_T_eps_inverse(map, base);
  const auto bundle = jacobian_at(map, pre);
  Eigen::Vector2d t(1.0, ps);
  t.normalize();
  return (bundle.DT.inverse() * t).norm();
}

TriMesh map_mesh_through(const TriMesh& mesh, const PerturbationMap& map) {
  TriMesh out = mesh;
  for (auto& node : out.nodes) node = apply_T_eps(map, node);
  for (const auto& t : out.triangles) {
    const Eigen::Vector2d& p0 = out.nodes[t[0]];
    const Eigen::Vector2d& p1 = out.nodes[t[1]];
    const Eigen::Vector2d& p2 = out.nodes[t[2]];
    const double area2 = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    if (area2 <= 0.0) throw MapError("map_mesh_through: transported triangle degenerated");
  }
  out.total_boundary_length = 0.0;
  for (auto& e : out.boundary_edges) {
    e.length = (out.nodes[e.n1] - out.nodes[e.n0]).norm();
    out.total_boundary_length += e.length;
  }
  return out;
}

double homogenized_weight(double phi_slope, const OscillationSpec& osc, int min_panels) {
  if (osc.is_zero()) return 1.0;
  if (min_panels < 16) throw ConfigError("homogenized_weight: need at least 16 panels per cell");
  const double cell = integrate_to_tol(
      [&](double y) {
        const double s = phi_slope + osc.fprime(y);
        return std::sqrt(1.0 + s * s);
      },
      0.0, 1.0, 1e-12, min_panels);
  return cell / std::sqrt(1.0 + phi_slope * phi_slope);
}

WeightField build_weight_field(const TriMesh& mesh, const ChartFn& phi,
                               const OscillationSpec& osc) {
  WeightField field;
  field.edge_m.resize(mesh.boundary_edges.size(), 1.0);
  double cached_slope = 0.0;
  double cached_m = 0.0;
  bool have_cache = false;
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    const auto& e = mesh.boundary_edges[i];
    if (e.tag != EdgeTag::Chart) continue;
    const double xm = 0.5 * (e.t0 + e.t1);
    const double slope = phi.deriv(xm);
    if (!have_cache || slope != cached_slope) {
      cached_slope = slope;
      cached_m = homogenized_weight(slope, osc);
      have_cache = true;
    }
    field.edge_m[i] = cached_m;
  }
  field.total_weighted_length = 0.0;
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
    field.total_weighted_length += field.edge_m[i] * mesh.boundary_edges[i].length;
  return field;
}

std::vector<WeakstarRow> weakstar_test(const std::function<double(double)>& g,
                                       const std::vector<int>& ks,
                                       const OscillationSpec& osc, const ChartFn& phi) {
  const GaussRule& rule = gauss_rule(16);

  auto ds = [&](double x) {
    const double ps = phi.deriv(x);
    return std::sqrt(1.0 + ps * ps);
  };

  // limit side: eps-independent
  double limit = integrate_to_tol(
      [&](double x) { return g(x) * homogenized_weight(phi.deriv(x), osc) * ds(x); }, 0.0,
      1.0, 1e-12, 64);

  std::vector<WeakstarRow> rows;
  for (int k : ks) {
    const double eps = 1.0 / k;
    PerturbationMap map(phi, osc, eps);
    auto integrand = [&](double x) { return g(x) * jtau_inverse_at_base_chart(map, x) * ds(x); };
    int panels = 8 * k;
    double prev = rule.composite(integrand, 0.0, 1.0, panels);
    double cur = prev;
    for (int it = 0; it < 6; ++it) {
      panels *= 2;
      cur = rule.composite(integrand, 0.0, 1.0, panels);
      if (std::abs(cur - prev) < 5e-12 * std::max(1.0, std::abs(cur))) break;
      prev = cur;
    }
    rows.push_back({k, eps, std::abs(cur - limit)});
  }
  return rows;
}

void write_weakstar_csv(const std::vector<WeakstarRow>& rows, const std::string& g_id,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open csv output file: " + path);
  out << "k,eps,g_id,error\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%s,%.12g\n", r.k, r.eps, g_id.c_str(), r.error);
    out << buf;
  }
  if (!out) throw Error("failed writing csv: " + path);
}

} // namespace steklov
