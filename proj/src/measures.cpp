#include "steklov/measures.hpp"

#include <algorithm>
#include <cmath>

#include "steklov/quadrature.hpp"

namespace steklov {

namespace {

// Cumulative arclength of a chart polyline as a piecewise-linear function of
// x (exact for a polyline, each segment accrues length linearly in x).
struct ChartArc {
  std::vector<double> xs;  // ascending
  std::vector<double> cum; // cum[i] = length of the polyline over [xs[0], xs[i]]

  double cum_at(double x) const {
    if (x <= xs.front()) return 0.0;
    if (x >= xs.back()) return cum.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return cum[i] + t * (cum[i + 1] - cum[i]);
  }

  double length(double a, double b) const { return cum_at(b) - cum_at(a); }
};

ChartArc chart_arc(const ChartedDomain& dom) {
  if (dom.chart_begin < 0) throw MeasureError("domain has no chart portion");
  ChartArc arc;
  for (int i = dom.chart_end; i >= dom.chart_begin; --i) {
    arc.xs.push_back(dom.polyline[i].x());
    if (arc.xs.size() == 1) {
      arc.cum.push_back(0.0);
    } else {
      const std::size_t j = arc.xs.size() - 2;
      const Eigen::Vector2d a = dom.polyline[i + 1], b = dom.polyline[i];
      arc.cum.push_back(arc.cum[j] + (b - a).norm());
    }
  }
  return arc;
}

// canonical parameter interval of an edge, as an ascending [lo, hi] pair
std::pair<double, double> edge_interval(const BoundaryEdge& e) {
  return {std::min(e.t0, e.t1), std::max(e.t0, e.t1)};
}

// covered sub-interval when the edge is filled by `frac` from its cycle start
std::pair<double, double> covered_interval(const BoundaryEdge& e, double frac) {
  const double t = e.t0 + frac * (e.t1 - e.t0);
  return {std::min(e.t0, t), std::max(e.t0, t)};
}

struct IntervalSet {
  // per part, sorted disjoint intervals
  std::vector<std::pair<double, double>> parts[5];

  void add(BoundaryPart part, double lo, double hi) {
    if (hi > lo) parts[static_cast<int>(part)].emplace_back(lo, hi);
  }

  void normalize() {
    for (auto& list : parts) {
      std::sort(list.begin(), list.end());
      std::vector<std::pair<double, double>> merged;
      for (const auto& iv : list) {
        if (!merged.empty() && iv.first <= merged.back().second + 1e-15)
          merged.back().second = std::max(merged.back().second, iv.second);
        else
          merged.push_back(iv);
      }
      list = std::move(merged);
    }
  }

  double overlap(BoundaryPart part, double lo, double hi) const {
    double sum = 0.0;
    for (const auto& iv : parts[static_cast<int>(part)])
      sum += std::max(0.0, std::min(hi, iv.second) - std::max(lo, iv.first));
    return sum;
  }
};

IntervalSet window_intervals(const TriMesh& mesh, const Window& window) {
  IntervalSet set;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const double f = window.fracs[static_cast<Eigen::Index>(e)];
    if (f <= 0.0) continue;
    const auto& be = mesh.boundary_edges[e];
    const auto [lo, hi] = covered_interval(be, std::min(f, 1.0));
    set.add(be.part, lo, hi);
  }
  set.normalize();
  return set;
}

Window rasterize(const TriMesh& mesh, const IntervalSet& set) {
  Window w = empty_window(mesh);
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    const auto [lo, hi] = edge_interval(be);
    if (hi <= lo) continue;
    const double cov = set.overlap(be.part, lo, hi);
    w.fracs[static_cast<Eigen::Index>(e)] = std::clamp(cov / (hi - lo), 0.0, 1.0);
  }
  return w;
}

void check_window(const TriMesh& mesh, const Window& w) {
  if (w.fracs.size() != static_cast<Eigen::Index>(mesh.boundary_edges.size()))
    throw MeasureError("window does not match the boundary discretization");
}

} // namespace

DiscreteBoundaryMeasure surface_measure(const TriMesh& mesh) {
  DiscreteBoundaryMeasure mu;
  mu.kind = MeasureKind::Surface;
  mu.w.resize(mesh.boundary_edges.size());
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e)
    mu.w[e] = mesh.boundary_edges[e].length;
  return mu;
}

DiscreteBoundaryMeasure mu_star_measure(const TriMesh& mesh, const WeightField& field) {
  if (field.edge_m.size() != mesh.boundary_edges.size())
    throw MeasureError("weight field does not match the boundary discretization");
  DiscreteBoundaryMeasure mu;
  mu.kind = MeasureKind::MuStar;
  mu.w.resize(mesh.boundary_edges.size());
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e)
    mu.w[e] = field.edge_m[e] * mesh.boundary_edges[e].length;
  return mu;
}

DiscreteBoundaryMeasure mu_eps_measure(const TriMesh& base_mesh,
                                       const ChartedDomain& pert_domain) {
  if (!pert_domain.pert.has_value())
    throw MeasureError("mu_eps requires a perturbed domain");
  const ChartArc arc = chart_arc(pert_domain);
  DiscreteBoundaryMeasure mu;
  mu.kind = MeasureKind::MuEps;
  mu.eps = pert_domain.pert->eps;
  mu.w.resize(base_mesh.boundary_edges.size());
  for (std::size_t e = 0; e < base_mesh.boundary_edges.size(); ++e) {
    const auto& be = base_mesh.boundary_edges[e];
    if (be.tag == EdgeTag::Chart) {
      const auto [lo, hi] = edge_interval(be);
      mu.w[e] = arc.length(lo, hi);
    } else {
      mu.w[e] = be.length;
    }
  }
  return mu;
}

DiscreteBoundaryMeasure window_measure(const DiscreteBoundaryMeasure& mu, const Window& window,
                                       MeasureKind kind) {
  if (window.fracs.size() != mu.w.size())
    throw MeasureError("window does not match the measure discretization");
  DiscreteBoundaryMeasure nu;
  nu.kind = kind;
  nu.eps = mu.eps;
  nu.w = window.fracs.cwiseProduct(mu.w);
  return nu;
}

Window pullback_window(const TriMesh& pert_mesh, const Window& gamma_eps,
                       const TriMesh& base_mesh) {
  check_window(pert_mesh, gamma_eps);
  const IntervalSet set = window_intervals(pert_mesh, gamma_eps);
  Window pulled = rasterize(base_mesh, set);

  // exact transported measure: perturbed arclength of the chart intervals
  // (the chart polylines of both discretizations describe the same set),
  // plus the untouched off-chart lengths
  double measure = 0.0;
  for (std::size_t e = 0; e < pert_mesh.boundary_edges.size(); ++e)
    measure += gamma_eps.fracs[static_cast<Eigen::Index>(e)] * pert_mesh.boundary_edges[e].length;
  pulled.measure = measure;
  pulled.target = gamma_eps.target;
  return pulled;
}

double symmetric_difference_measure(const Window& a, const Window& b,
                                    const DiscreteBoundaryMeasure& mu) {
  if (a.fracs.size() != b.fracs.size() || a.fracs.size() != mu.w.size())
    throw MeasureError("symmetric difference: mismatched discretizations");
  return (a.fracs - b.fracs).cwiseAbs().dot(mu.w);
}

Window reflect_window(const TriMesh& mesh, const Window& window,
                      const DiscreteBoundaryMeasure& mu) {
  check_window(mesh, window);
  const IntervalSet set = window_intervals(mesh, window);
  IntervalSet mirrored;
  // Bottom/Chart: x -> 1 - x; Right <-> Left (heights are shared since the
  // chart meets both walls at the same height on symmetric domains).
  for (const auto& iv : set.parts[static_cast<int>(BoundaryPart::Bottom)])
    mirrored.add(BoundaryPart::Bottom, 1.0 - iv.second, 1.0 - iv.first);
  for (const auto& iv : set.parts[static_cast<int>(BoundaryPart::Chart)])
    mirrored.add(BoundaryPart::Chart, 1.0 - iv.second, 1.0 - iv.first);
  for (const auto& iv : set.parts[static_cast<int>(BoundaryPart::Right)])
    mirrored.add(BoundaryPart::Left, iv.first, iv.second);
  for (const auto& iv : set.parts[static_cast<int>(BoundaryPart::Left)])
    mirrored.add(BoundaryPart::Right, iv.first, iv.second);
  for (const auto& iv : set.parts[static_cast<int>(BoundaryPart::Circle)])
    mirrored.add(BoundaryPart::Circle, iv.first, iv.second);
  mirrored.normalize();
  Window out = rasterize(mesh, mirrored);
  out.measure = out.fracs.dot(mu.w);
  out.target = window.target;
  return out;
}

double small_value_mass(const TriMesh& mesh, const Eigen::VectorXd& u, int j,
                        const DiscreteBoundaryMeasure& mu) {
  if (j < 1) throw ConfigError("small_value_mass: j must be at least 1");
  if (u.size() != mesh.num_nodes()) throw ShapeError("nodal vector size does not match mesh");
  const double level = 1.0 / j;
  double mass = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    const double avg = simpson_abs_avg(u[be.n0], u[be.n1]);
    if (avg > 0.0 && avg <= level) mass += mu.w[e];
  }
  return mass;
}

WeakMeasureResult weak_measure_test(const std::function<double(const Eigen::Vector2d&)>& f,
                                    const TriMesh& base_mesh, const Window& gamma_eps_pulled,
                                    const DiscreteBoundaryMeasure& mu_eps,
                                    const Window& gamma_star,
                                    const DiscreteBoundaryMeasure& mu_star,
                                    const PerturbationMap& map) {
  check_window(base_mesh, gamma_eps_pulled);
  check_window(base_mesh, gamma_star);
  if (mu_eps.w.size() != mu_star.w.size())
    throw MeasureError("weak_measure_test: mismatched measures");

  WeakMeasureResult res;
  for (std::size_t e = 0; e < base_mesh.boundary_edges.size(); ++e) {
    const auto& be = base_mesh.boundary_edges[e];
    const Eigen::Vector2d p0 = base_mesh.nodes[be.n0];
    const Eigen::Vector2d p1 = base_mesh.nodes[be.n1];
    const Eigen::Vector2d pm = 0.5 * (p0 + p1);

    auto simpson = [&](auto&& g) { return (g(p0) + 4.0 * g(pm) + g(p1)) / 6.0; };
    const double avg_f = simpson(f);
    const double avg_f_pre =
        simpson([&](const Eigen::Vector2d& y) { return f(apply_T_eps_inverse(map, y)); });

    const double fa = gamma_eps_pulled.fracs[static_cast<Eigen::Index>(e)];
    const double fb = gamma_star.fracs[static_cast<Eigen::Index>(e)];
    res.term_window += (fa - fb) * mu_eps.w[e] * avg_f_pre;
    res.term_transport += fb * mu_eps.w[e] * (avg_f_pre - avg_f);
    res.term_measure += fb * avg_f * (mu_eps.w[e] - mu_star.w[e]);
  }
  res.total = std::abs(res.term_window + res.term_transport + res.term_measure);
  return res;
}

} // namespace steklov
