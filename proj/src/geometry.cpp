#include "steklov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <utility>

#include "steklov/quadrature.hpp"

namespace steklov {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ---------------------------------------------------------------------------
// ChartFn / OscillationSpec

double ChartFn::operator()(double x) const {
  return c0 + c1 * x + c2 * std::sin(kPi * x) + c3 * std::sin(2.0 * kPi * x);
}

double ChartFn::deriv(double x) const {
  return c1 + c2 * kPi * std::cos(kPi * x) + c3 * 2.0 * kPi * std::cos(2.0 * kPi * x);
}

double ChartFn::deriv2(double x) const {
  return -c2 * kPi * kPi * std::sin(kPi * x) -
         c3 * 4.0 * kPi * kPi * std::sin(2.0 * kPi * x);
}

OscillationSpec OscillationSpec::zero(double a) {
  OscillationSpec s;
  s.profile = ProfileKind::Fourier;
  s.a = a;
  return s;
}

OscillationSpec OscillationSpec::sin_squared(double a) {
  OscillationSpec s;
  s.profile = ProfileKind::SinSquared;
  s.a = a;
  s.mean_grad = 2.0; // closed form: int_0^1 pi |sin(2 pi y)| dy
  s.sup_f = 1.0;
  s.sup_fprime = kPi;
  return s;
}

OscillationSpec OscillationSpec::fourier(double a, std::vector<double> cos_coeffs,
                                         std::vector<double> sin_coeffs) {
  OscillationSpec s;
  s.profile = ProfileKind::Fourier;
  s.a = a;
  s.fourier_cos = std::move(cos_coeffs);
  s.fourier_sin = std::move(sin_coeffs);
  if (!s.is_zero()) {
    s.mean_grad = integrate_to_tol([&s](double y) { return std::abs(s.fprime(y)); }, 0.0,
                                   1.0, 1e-11, 256);
    const int n = 16384;
    for (int i = 0; i <= n; ++i) {
      const double y = static_cast<double>(i) / n;
      s.sup_f = std::max(s.sup_f, std::abs(s.f(y)));
      s.sup_fprime = std::max(s.sup_fprime, std::abs(s.fprime(y)));
    }
  }
  return s;
}

double OscillationSpec::f(double y) const {
  if (profile == ProfileKind::SinSquared) {
    const double sy = std::sin(kPi * y);
    return sy * sy;
  }
  double v = 0.0;
  for (std::size_t j = 0; j < fourier_cos.size(); ++j)
    v += fourier_cos[j] * (std::cos(2.0 * kPi * (j + 1) * y) - 1.0);
  for (std::size_t j = 0; j < fourier_sin.size(); ++j)
    v += fourier_sin[j] * std::sin(2.0 * kPi * (j + 1) * y);
  return v;
}

double OscillationSpec::fprime(double y) const {
  if (profile == ProfileKind::SinSquared) return kPi * std::sin(2.0 * kPi * y);
  double v = 0.0;
  for (std::size_t j = 0; j < fourier_cos.size(); ++j)
    v -= fourier_cos[j] * 2.0 * kPi * (j + 1) * std::sin(2.0 * kPi * (j + 1) * y);
  for (std::size_t j = 0; j < fourier_sin.size(); ++j)
    v += fourier_sin[j] * 2.0 * kPi * (j + 1) * std::cos(2.0 * kPi * (j + 1) * y);
  return v;
}

bool OscillationSpec::is_zero() const {
  if (profile == ProfileKind::SinSquared) return false;
  auto all_zero = [](const std::vector<double>& c) {
    return std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
  };
  return all_zero(fourier_cos) && all_zero(fourier_sin);
}

// ---------------------------------------------------------------------------
// ChartedDomain

double ChartedDomain::top(double x) const {
  double v = phi(x);
  if (pert && !pert->osc.is_zero())
    v += std::pow(pert->eps, pert->osc.a) * pert->osc.f(x / pert->eps);
  return v;
}

double ChartedDomain::top_deriv(double x) const {
  double v = phi.deriv(x);
  if (pert && !pert->osc.is_zero())
    v += std::pow(pert->eps, pert->osc.a - 1.0) * pert->osc.fprime(x / pert->eps);
  return v;
}

int checked_cell_count(double eps) {
  if (!(eps > 0.0) || eps > 0.5) throw ConfigError("eps must be 1/k with integer k >= 2");
  const double kd = 1.0 / eps;
  const long k = std::lround(kd);
  if (k < 2 || std::abs(kd - static_cast<double>(k)) > 1e-9 * kd)
    throw ConfigError("eps must be 1/k with integer k >= 2");
  return static_cast<int>(k);
}

namespace {

double polyline_length(const std::vector<Eigen::Vector2d>& poly) {
  double len = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    len += (poly[(i + 1) % poly.size()] - poly[i]).norm();
  return len;
}

// Assembles the closed CCW square polyline: bottom, right side, chart
// (right to left), left side. chart_samples are ascending in x and span [0,1].
void assemble_square_polyline(ChartedDomain& dom,
                              const std::vector<Eigen::Vector2d>& chart_samples,
                              double resolution) {
  const double top_left = chart_samples.front().y();
  const double top_right = chart_samples.back().y();
  if (top_left <= 0.0 || top_right <= 0.0) throw GeometryError("chart height must stay positive");

  const int nb = std::max(1, static_cast<int>(std::ceil(1.0 / resolution)));
  const int nr = std::max(1, static_cast<int>(std::ceil(top_right / resolution)));
  const int nl = std::max(1, static_cast<int>(std::ceil(top_left / resolution)));

  std::vector<Eigen::Vector2d>& poly = dom.polyline;
  poly.clear();
  for (int i = 0; i < nb; ++i) poly.emplace_back(static_cast<double>(i) / nb, 0.0);
  for (int i = 0; i < nr; ++i) poly.emplace_back(1.0, top_right * i / nr);
  dom.chart_begin = static_cast<int>(poly.size());
  for (auto it = chart_samples.rbegin(); it != chart_samples.rend(); ++it) poly.push_back(*it);
  dom.chart_end = static_cast<int>(poly.size()) - 1; // segments [begin, end)
  for (int i = nl - 1; i >= 1; --i) poly.emplace_back(0.0, top_left * i / nl);

  dom.chart_length = 0.0;
  for (int i = dom.chart_begin; i < dom.chart_end; ++i)
    dom.chart_length += (poly[i + 1] - poly[i]).norm();
  dom.total_length = polyline_length(poly);
  dom.resolution = resolution;

  // Simplicity of a graph chart over a box reduces to a positive height.
  for (const auto& p : chart_samples)
    if (p.y() <= 0.0) throw GeometryError("self-intersecting polyline: chart touches the bottom");
}

} // namespace

ChartedDomain build_base_domain(DomainKind kind, const ChartFn& phi, double resolution) {
  if (!(resolution > 0.0)) throw ConfigError("resolution must be positive");
  ChartedDomain dom;
  dom.kind = kind;
  dom.phi = phi;

  if (kind == DomainKind::UnitDisk) {
    const int n = std::max(8, static_cast<int>(std::ceil(2.0 * kPi / resolution)));
    dom.polyline.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * kPi * i / n;
      dom.polyline.emplace_back(std::cos(th), std::sin(th));
    }
    dom.chart_begin = dom.chart_end = -1;
    dom.chart_length = 0.0;
    dom.total_length = polyline_length(dom.polyline);
    dom.resolution = resolution;
    return dom;
  }

  const int nc = std::max(1, static_cast<int>(std::ceil(1.0 / resolution)));
  std::vector<Eigen::Vector2d> chart;
  chart.reserve(nc + 1);
  for (int i = 0; i <= nc; ++i) {
    const double x = static_cast<double>(i) / nc;
    chart.emplace_back(x, phi(x));
  }
  assemble_square_polyline(dom, chart, resolution);
  return dom;
}

ChartedDomain build_perturbed_boundary(const ChartedDomain& domain, const OscillationSpec& osc,
                                       double eps) {
  if (domain.kind != DomainKind::SquareTopChart)
    throw ConfigError("periodic perturbations are defined for SquareTopChart domains");
  const int k = checked_cell_count(eps);

  ChartedDomain dom;
  dom.kind = domain.kind;
  dom.phi = domain.phi;
  dom.pert = Perturbation{osc, eps};

  if (osc.is_zero()) {
    dom = domain;
    dom.pert = Perturbation{osc, eps};
    return dom;
  }

  const double amp = std::pow(eps, osc.a);
  const int per_cell =
      std::max(16, static_cast<int>(std::ceil(eps / domain.resolution)));

  // Cell-local sampling keeps the profile argument exact at cell boundaries,
  // so chart endpoints reproduce phi(0), phi(1) bit-for-bit.
  std::vector<Eigen::Vector2d> chart;
  chart.reserve(static_cast<std::size_t>(k) * per_cell + 1);
  for (int cell = 0; cell < k; ++cell) {
    for (int i = 0; i < per_cell; ++i) {
      const double t = static_cast<double>(i) / per_cell;
      const double x = (cell + t) * eps;
      chart.emplace_back(x, domain.phi(x) + amp * osc.f(t));
    }
  }
  chart.emplace_back(1.0, domain.phi(1.0) + amp * osc.f(0.0));

  assemble_square_polyline(dom, chart, domain.resolution);
  return dom;
}

// ---------------------------------------------------------------------------
// Meshing

double TriMesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles) {
    const Eigen::Vector2d& p0 = nodes[t[0]];
    const Eigen::Vector2d& p1 = nodes[t[1]];
    const Eigen::Vector2d& p2 = nodes[t[2]];
    a += 0.5 * ((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
  }
  return a;
}

bool TriMesh::on_boundary(int node) const { return boundary_node_index[node] >= 0; }

namespace {

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

void finalize_mesh(TriMesh& mesh) {
  for (const auto& t : mesh.triangles) {
    if (signed_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]) <= 0.0)
      throw GeometryError("mesh generation produced a non-positive triangle");
  }
  mesh.total_boundary_length = 0.0;
  for (const auto& e : mesh.boundary_edges) mesh.total_boundary_length += e.length;
  mesh.boundary_node_index.assign(mesh.nodes.size(), -1);
  mesh.boundary_nodes.resize(mesh.boundary_edges.size());
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    mesh.boundary_nodes[i] = mesh.boundary_edges[i].n0;
    mesh.boundary_node_index[mesh.boundary_edges[i].n0] = static_cast<int>(i);
  }
  // cycle consistency
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    const auto& e = mesh.boundary_edges[i];
    const auto& next = mesh.boundary_edges[(i + 1) % mesh.boundary_edges.size()];
    if (e.n1 != next.n0) throw GeometryError("boundary edges do not form a closed cycle");
  }
}

TriMesh mesh_square(const ChartedDomain& dom, double h) {
  // Columns: chart polyline vertices (ascending x), subdivided along the
  // straight polyline segments to spacing <= h. Subdivision preserves the
  // polyline geometry exactly.
  std::vector<Eigen::Vector2d> cols;
  for (int i = dom.chart_end; i >= dom.chart_begin; --i) cols.push_back(dom.polyline[i]);
  std::vector<double> xs, tops;
  for (std::size_t i = 0; i + 1 < cols.size(); ++i) {
    const Eigen::Vector2d a = cols[i], b = cols[i + 1];
    const int sub = std::max(1, static_cast<int>(std::ceil((b.x() - a.x()) / h)));
    for (int s = 0; s < sub; ++s) {
      const double t = static_cast<double>(s) / sub;
      xs.push_back(a.x() + t * (b.x() - a.x()));
      tops.push_back(a.y() + t * (b.y() - a.y()));
    }
  }
  xs.push_back(cols.back().x());
  tops.push_back(cols.back().y());
  const int C = static_cast<int>(xs.size());

  const int ny = std::max(1, static_cast<int>(std::ceil(1.0 / h)));
  const double dy = 1.0 / ny;

  TriMesh mesh;
  mesh.h = h;

  // Per-column stacks: grid rows j*dy for j = 0..J_i, then the top vertex.
  // Rows closer than 0.3*dy to the top are dropped to avoid slivers.
  std::vector<int> col_start(C), col_rows(C);
  int id = 0;
  for (int i = 0; i < C; ++i) {
    if (tops[i] <= 0.5 * dy) throw GeometryError("degenerate polygon: chart height below mesh size");
    int J = static_cast<int>(std::floor((tops[i] - 0.3 * dy) / dy));
    J = std::max(J, 0);
    col_start[i] = id;
    col_rows[i] = J;
    for (int j = 0; j <= J; ++j) mesh.nodes.emplace_back(xs[i], j * dy);
    mesh.nodes.emplace_back(xs[i], tops[i]);
    id += J + 2;
  }

  auto col_node = [&](int i, int j) { return col_start[i] + j; };
  auto col_top = [&](int i) { return col_start[i] + col_rows[i] + 1; };
  auto node_y = [&](int n) { return mesh.nodes[n].y(); };

  // Zipper triangulation of each trapezoidal strip between adjacent columns.
  for (int i = 0; i + 1 < C; ++i) {
    std::vector<int> L, R;
    for (int j = 0; j <= col_rows[i]; ++j) L.push_back(col_node(i, j));
    L.push_back(col_top(i));
    for (int j = 0; j <= col_rows[i + 1]; ++j) R.push_back(col_node(i + 1, j));
    R.push_back(col_top(i + 1));
    std::size_t a = 0, b = 0;
    while (a + 1 < L.size() || b + 1 < R.size()) {
      bool advance_left;
      if (a + 1 == L.size())
        advance_left = false;
      else if (b + 1 == R.size())
        advance_left = true;
      else
        advance_left = node_y(L[a + 1]) <= node_y(R[b + 1]);
      if (advance_left) {
        mesh.triangles.emplace_back(L[a], R[b], L[a + 1]);
        ++a;
      } else {
        mesh.triangles.emplace_back(L[a], R[b], R[b + 1]);
        ++b;
      }
    }
  }

  // Boundary cycle: bottom (left to right), right side up, chart right to
  // left, left side down. Starts at (0, 0).
  auto add_edge = [&](int n0, int n1, EdgeTag tag, BoundaryPart part, double t0, double t1) {
    BoundaryEdge e;
    e.n0 = n0;
    e.n1 = n1;
    e.length = (mesh.nodes[n1] - mesh.nodes[n0]).norm();
    e.tag = tag;
    e.part = part;
    e.t0 = t0;
    e.t1 = t1;
    mesh.boundary_edges.push_back(e);
  };
  for (int i = 0; i + 1 < C; ++i)
    add_edge(col_node(i, 0), col_node(i + 1, 0), EdgeTag::Other, BoundaryPart::Bottom, xs[i],
             xs[i + 1]);
  {
    const int i = C - 1;
    for (int j = 0; j < col_rows[i]; ++j)
      add_edge(col_node(i, j), col_node(i, j + 1), EdgeTag::Other, BoundaryPart::Right, j * dy,
               (j + 1) * dy);
    add_edge(col_node(i, col_rows[i]), col_top(i), EdgeTag::Other, BoundaryPart::Right,
             col_rows[i] * dy, tops[i]);
  }
  for (int i = C - 1; i >= 1; --i)
    add_edge(col_top(i), col_top(i - 1), EdgeTag::Chart, BoundaryPart::Chart, xs[i], xs[i - 1]);
  {
    const int i = 0;
    add_edge(col_top(i), col_node(i, col_rows[i]), EdgeTag::Other, BoundaryPart::Left, tops[i],
             col_rows[i] * dy);
    for (int j = col_rows[i]; j >= 1; --j)
      add_edge(col_node(i, j), col_node(i, j - 1), EdgeTag::Other, BoundaryPart::Left, j * dy,
               (j - 1) * dy);
  }

  finalize_mesh(mesh);
  return mesh;
}

TriMesh mesh_disk(const ChartedDomain& dom, double h) {
  const int M = std::max(2, static_cast<int>(std::ceil(1.0 / h)));
  const int n_outer = static_cast<int>(dom.polyline.size());

  TriMesh mesh;
  mesh.h = h;

  // Ring m has radius m/M; the outer ring reuses the polyline vertices.
  std::vector<int> ring_start(M + 1), ring_count(M + 1);
  mesh.nodes.emplace_back(0.0, 0.0);
  ring_start[0] = 0;
  ring_count[0] = 1;
  int id = 1;
  for (int m = 1; m <= M; ++m) {
    const double r = static_cast<double>(m) / M;
    const int n = (m == M)
                      ? n_outer
                      : std::max(6, static_cast<int>(std::lround(static_cast<double>(n_outer) * m / M)));
    ring_start[m] = id;
    ring_count[m] = n;
    for (int i = 0; i < n; ++i) {
      if (m == M) {
        mesh.nodes.push_back(dom.polyline[i]);
      } else {
        const double th = 2.0 * kPi * i / n;
        mesh.nodes.emplace_back(r * std::cos(th), r * std::sin(th));
      }
      ++id;
    }
  }

  // Center fan.
  for (int i = 0; i < ring_count[1]; ++i)
    mesh.triangles.emplace_back(0, ring_start[1] + i, ring_start[1] + (i + 1) % ring_count[1]);

  // Angle zipper between consecutive rings.
  for (int m = 1; m < M; ++m) {
    const int na = ring_count[m], nb = ring_count[m + 1];
    auto inner = [&](int i) { return ring_start[m] + (i % na); };
    auto outer = [&](int i) { return ring_start[m + 1] + (i % nb); };
    auto inner_angle = [&](int i) { return 2.0 * kPi * i / na; };
    auto outer_angle = [&](int i) { return 2.0 * kPi * i / nb; };
    int a = 0, b = 0;
    while (a < na || b < nb) {
      const double next_a = (a < na) ? inner_angle(a + 1) : 1e30;
      const double next_b = (b < nb) ? outer_angle(b + 1) : 1e30;
      if (next_a <= next_b) {
        mesh.triangles.emplace_back(inner(a), outer(b), inner(a + 1));
        ++a;
      } else {
        mesh.triangles.emplace_back(inner(a), outer(b), outer(b + 1));
        ++b;
      }
    }
  }

  for (int i = 0; i < n_outer; ++i) {
    BoundaryEdge e;
    e.n0 = ring_start[M] + i;
    e.n1 = ring_start[M] + (i + 1) % n_outer;
    e.length = (mesh.nodes[e.n1] - mesh.nodes[e.n0]).norm();
    e.tag = EdgeTag::Other;
    e.part = BoundaryPart::Circle;
    e.t0 = 2.0 * kPi * i / n_outer;
    e.t1 = 2.0 * kPi * (i + 1) / n_outer;
    mesh.boundary_edges.push_back(e);
  }

  finalize_mesh(mesh);
  return mesh;
}

} // namespace

TriMesh generate_mesh(const ChartedDomain& domain, double h) {
  if (!(h > 0.0)) throw ConfigError("mesh size h must be positive");
  if (domain.is_perturbed() && h > domain.pert->eps / 8.0 + 1e-12)
    throw ConfigError("perturbed domains require h <= eps/8");
  if (domain.kind == DomainKind::UnitDisk) return mesh_disk(domain, h);
  return mesh_square(domain, h);
}

// ---------------------------------------------------------------------------
// Chart arclength quadrature with the subcritical residual check

ChartLengthResult perturbed_chart_length(const ChartFn& phi, const OscillationSpec& osc,
                                         double eps, int order) {
  double a_exp = osc.a;
  int cells = 1;
  double slope_scale = 0.0; // eps^(a-1)
  if (!osc.is_zero()) {
    cells = checked_cell_count(eps);
    slope_scale = std::pow(eps, a_exp - 1.0);
  }
  const double eps_pow = osc.is_zero() ? 1.0 : std::pow(eps, 1.0 - a_exp);

  const GaussRule& rule = gauss_rule(order);
  ChartLengthResult res;
  double worst_excess = -1e300;

  auto integrand = [&](double x, bool record) {
    const double ps = phi.deriv(x);
    const double fp = osc.is_zero() ? 0.0 : osc.fprime(x / eps);
    const double slope = ps + slope_scale * fp;
    if (record) {
      // rho_eps = sqrt(eps^{2(1-a)} + |eps^{1-a} phi' + f'|^2) - |f'|
      const double rho =
          std::sqrt(eps_pow * eps_pow + (eps_pow * ps + fp) * (eps_pow * ps + fp)) -
          std::abs(fp);
      const double bound = eps_pow * (1.0 + std::abs(ps));
      res.rho_max = std::max(res.rho_max, std::abs(rho));
      worst_excess = std::max(worst_excess, std::abs(rho) - bound);
    }
    return std::sqrt(1.0 + slope * slope);
  };

  int panels_per_cell = 8;
  double prev = 0.0;
  for (int pass = 0;; ++pass) {
    double total = 0.0;
    res.rho_max = 0.0;
    worst_excess = -1e300;
    const double dx = 1.0 / (cells * panels_per_cell);
    for (int p = 0; p < cells * panels_per_cell; ++p)
      total += rule.panel([&](double x) { return integrand(x, true); }, p * dx, (p + 1) * dx);
    if (pass > 0 && std::abs(total - prev) < 1e-11 * std::max(1.0, std::abs(total))) {
      res.length = total;
      break;
    }
    if (pass >= 8) {
      res.length = total;
      break;
    }
    prev = total;
    panels_per_cell *= 2;
  }
  // rho_max <= rho_bound iff the pointwise bound held at every quadrature point.
  res.rho_bound = res.rho_max - worst_excess;
  return res;
}

TriMesh refine_uniform(const TriMesh& mesh) {
  TriMesh fine;
  fine.h = 0.5 * mesh.h;
  fine.nodes = mesh.nodes;

  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(fine.nodes.size());
    fine.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
    midpoint.emplace(key, id);
    return id;
  };

  for (const auto& t : mesh.triangles) {
    const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    fine.triangles.emplace_back(t[0], m01, m20);
    fine.triangles.emplace_back(t[1], m12, m01);
    fine.triangles.emplace_back(t[2], m20, m12);
    fine.triangles.emplace_back(m01, m12, m20);
  }

  for (const auto& e : mesh.boundary_edges) {
    const int m = mid(e.n0, e.n1);
    BoundaryEdge h1 = e, h2 = e;
    h1.n1 = m;
    h1.length = (fine.nodes[m] - fine.nodes[e.n0]).norm();
    h1.t1 = 0.5 * (e.t0 + e.t1);
    h2.n0 = m;
    h2.length = (fine.nodes[e.n1] - fine.nodes[m]).norm();
    h2.t0 = 0.5 * (e.t0 + e.t1);
    fine.boundary_edges.push_back(h1);
    fine.boundary_edges.push_back(h2);
  }

  finalize_mesh(fine);
  return fine;
}

void write_mesh_off(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open mesh output file: " + path);
  out << mesh.nodes.size() << " " << mesh.triangles.size() << "\n";
  char buf[96];
  for (const auto& n : mesh.nodes) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", n.x(), n.y());
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  if (!out) throw Error("failed writing mesh file: " + path);
}

} // namespace steklov
