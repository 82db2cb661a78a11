#include "steklov/fem.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "steklov/quadrature.hpp"

namespace steklov {

namespace {

struct TriGeom {
  double area;
  Eigen::Vector2d grad_lambda[3];
};

TriGeom tri_geometry(const TriMesh& mesh, const Eigen::Vector3i& t) {
  const Eigen::Vector2d& p0 = mesh.nodes[t[0]];
  const Eigen::Vector2d& p1 = mesh.nodes[t[1]];
  const Eigen::Vector2d& p2 = mesh.nodes[t[2]];
  TriGeom g;
  g.area = 0.5 * ((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
  const Eigen::Vector2d e0 = p2 - p1, e1 = p0 - p2, e2 = p1 - p0;
  const double inv = 1.0 / (2.0 * g.area);
  g.grad_lambda[0] = inv * Eigen::Vector2d(-e0.y(), e0.x());
  g.grad_lambda[1] = inv * Eigen::Vector2d(-e1.y(), e1.x());
  g.grad_lambda[2] = inv * Eigen::Vector2d(-e2.y(), e2.x());
  return g;
}

double abs_pow(double v, double p) { return std::pow(std::abs(v), p); }

double sign_pow(double v, double p) {
  // d/dv |v|^p = p |v|^(p-2) v
  if (v == 0.0) return 0.0;
  return p * std::pow(std::abs(v), p - 1.0) * (v > 0.0 ? 1.0 : -1.0);
}

void check_sizes(const TriMesh& mesh, const Eigen::VectorXd& u) {
  if (u.size() != mesh.num_nodes())
    throw ShapeError("nodal vector size does not match the mesh");
}

void check_measure(const TriMesh& mesh, const Eigen::VectorXd& w) {
  if (w.size() != static_cast<Eigen::Index>(mesh.boundary_edges.size()))
    throw MeasureError("edge weight vector does not match the boundary");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w[i] < 0.0) throw MeasureError("negative boundary measure weight");
}

// degree-5 rule on the reference triangle (barycentric points, weights sum 1)
struct QuadPoint {
  double l0, l1, l2, w;
};
constexpr QuadPoint kTriQuad[7] = {
    {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
    {0.4701420641051151, 0.4701420641051151, 0.0597158717897698, 0.1323941527885062},
    {0.4701420641051151, 0.0597158717897698, 0.4701420641051151, 0.1323941527885062},
    {0.0597158717897698, 0.4701420641051151, 0.4701420641051151, 0.1323941527885062},
    {0.1012865073234563, 0.1012865073234563, 0.7974269853530873, 0.1259391805448271},
    {0.1012865073234563, 0.7974269853530873, 0.1012865073234563, 0.1259391805448271},
    {0.7974269853530873, 0.1012865073234563, 0.1012865073234563, 0.1259391805448271}};

} // namespace

// ---------------------------------------------------------------------------
// energies

double assemble_energy(const TriMesh& mesh, double p, const Eigen::VectorXd& u) {
  check_sizes(mesh, u);
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const TriGeom g = tri_geometry(mesh, t);
    const Eigen::Vector2d grad =
        u[t[0]] * g.grad_lambda[0] + u[t[1]] * g.grad_lambda[1] + u[t[2]] * g.grad_lambda[2];
    total += g.area * std::pow(grad.norm(), p);
    total += g.area / 3.0 * (abs_pow(u[t[0]], p) + abs_pow(u[t[1]], p) + abs_pow(u[t[2]], p));
  }
  return total;
}

Eigen::VectorXd energy_gradient(const TriMesh& mesh, double p, const Eigen::VectorXd& u) {
  check_sizes(mesh, u);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(u.size());
  for (const auto& t : mesh.triangles) {
    const TriGeom g = tri_geometry(mesh, t);
    const Eigen::Vector2d gu =
        u[t[0]] * g.grad_lambda[0] + u[t[1]] * g.grad_lambda[1] + u[t[2]] * g.grad_lambda[2];
    const double gn = gu.norm();
    const double scale = (gn > 0.0) ? g.area * p * std::pow(gn, p - 2.0) : 0.0;
    for (int i = 0; i < 3; ++i) {
      grad[t[i]] += scale * gu.dot(g.grad_lambda[i]);
      grad[t[i]] += g.area / 3.0 * sign_pow(u[t[i]], p);
    }
  }
  return grad;
}

double boundary_lp_power(const TriMesh& mesh, double p, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& w) {
  check_sizes(mesh, u);
  check_measure(mesh, w);
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    total += w[e] * simpson_abs_pow(u[be.n0], u[be.n1], p);
  }
  return total;
}

double boundary_lp_norm(const TriMesh& mesh, double p, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& w) {
  return std::pow(boundary_lp_power(mesh, p, u, w), 1.0 / p);
}

Eigen::VectorXd boundary_lp_power_gradient(const TriMesh& mesh, double p,
                                           const Eigen::VectorXd& u,
                                           const Eigen::VectorXd& w) {
  check_sizes(mesh, u);
  check_measure(mesh, w);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(u.size());
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    const double um = 0.5 * (u[be.n0] + u[be.n1]);
    const double dm = sign_pow(um, p);
    grad[be.n0] += w[e] / 6.0 * (sign_pow(u[be.n0], p) + 4.0 * dm * 0.5);
    grad[be.n1] += w[e] / 6.0 * (sign_pow(u[be.n1], p) + 4.0 * dm * 0.5);
  }
  return grad;
}

double rayleigh_quotient(const TriMesh& mesh, double p, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& w) {
  const double den = boundary_lp_power(mesh, p, u, w);
  if (den <= 0.0) throw SolverError("Rayleigh quotient: zero boundary norm");
  return assemble_energy(mesh, p, u) / den;
}

Eigen::VectorXd rayleigh_gradient(const TriMesh& mesh, double p, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& w) {
  const double den = boundary_lp_power(mesh, p, u, w);
  if (den <= 0.0) throw SolverError("Rayleigh gradient: zero boundary norm");
  const double num = assemble_energy(mesh, p, u);
  const double r = num / den;
  return (energy_gradient(mesh, p, u) - r * boundary_lp_power_gradient(mesh, p, u, w)) / den;
}

// ---------------------------------------------------------------------------
// p = 2 matrices

Eigen::SparseMatrix<double> build_p2_operator(const TriMesh& mesh,
                                              const OperatorCoefficients* coef) {
  const int n = mesh.num_nodes();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.triangles.size() * 12);
  for (const auto& t : mesh.triangles) {
    const TriGeom g = tri_geometry(mesh, t);
    Eigen::Matrix2d M = g.area * Eigen::Matrix2d::Identity();
    double mass_w[3] = {1.0, 1.0, 1.0};
    if (coef) {
      M.setZero();
      const Eigen::Vector2d& p0 = mesh.nodes[t[0]];
      const Eigen::Vector2d& p1 = mesh.nodes[t[1]];
      const Eigen::Vector2d& p2 = mesh.nodes[t[2]];
      for (const auto& q : kTriQuad) {
        const Eigen::Vector2d x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
        // gradient_coef carries the full integrand matrix (weights included)
        M += g.area * q.w * coef->gradient_coef(x);
      }
      for (int i = 0; i < 3; ++i) mass_w[i] = coef->weight(mesh.nodes[t[i]]);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(t[i], t[j], g.grad_lambda[i].dot(M * g.grad_lambda[j]));
      trips.emplace_back(t[i], t[i], g.area / 3.0 * mass_w[i]);
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

Eigen::SparseMatrix<double> build_boundary_mass(const TriMesh& mesh,
                                                const Eigen::VectorXd& w) {
  check_measure(mesh, w);
  const int n = mesh.num_nodes();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.boundary_edges.size() * 4);
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    const double s = w[e] / 6.0;
    trips.emplace_back(be.n0, be.n0, 2.0 * s);
    trips.emplace_back(be.n1, be.n1, 2.0 * s);
    trips.emplace_back(be.n0, be.n1, s);
    trips.emplace_back(be.n1, be.n0, s);
  }
  Eigen::SparseMatrix<double> B(n, n);
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

// ---------------------------------------------------------------------------
// p = 2 eigensolver

namespace {

Eigen::SparseMatrix<double> restrict_to_free(const Eigen::SparseMatrix<double>& M,
                                             const std::vector<int>& new_id, int n_free) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(M.nonZeros());
  for (int k = 0; k < M.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it) {
      const int i = new_id[it.row()], j = new_id[it.col()];
      if (i >= 0 && j >= 0) trips.emplace_back(i, j, it.value());
    }
  Eigen::SparseMatrix<double> R(n_free, n_free);
  R.setFromTriplets(trips.begin(), trips.end());
  return R;
}

} // namespace

TraceEigenpair solve_p2(const TriMesh& mesh, const Eigen::SparseMatrix<double>& A_full,
                        const Eigen::SparseMatrix<double>& B_full,
                        const Eigen::VectorXd& edge_weights,
                        const std::vector<int>& pinned_nodes, const SolverConfig& config) {
  const int n = mesh.num_nodes();
  std::vector<char> pinned(n, 0);
  for (int idx : pinned_nodes) pinned[idx] = 1;
  std::vector<int> new_id(n, -1);
  int n_free = 0;
  for (int i = 0; i < n; ++i)
    if (!pinned[i]) new_id[i] = n_free++;
  if (n_free == 0) throw InfeasibleError("all nodes pinned");

  const Eigen::SparseMatrix<double> A = restrict_to_free(A_full, new_id, n_free);
  const Eigen::SparseMatrix<double> B = restrict_to_free(B_full, new_id, n_free);
  if (B.nonZeros() == 0 || B.coeffs().sum() <= 0.0)
    throw InfeasibleError("boundary mass vanishes: window covers the whole boundary");

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(A);
  if (solver.info() != Eigen::Success) throw SolverError("factorization of the energy matrix failed");

  std::mt19937 rng(config.seed);
  std::uniform_real_distribution<double> jitter(0.9, 1.1);
  Eigen::VectorXd u(n_free);
  for (int i = 0; i < n_free; ++i) u[i] = jitter(rng);

  double lambda = 0.0;
  double resid = 1.0;
  int iters = 0;
  for (; iters < config.max_iter; ++iters) {
    const Eigen::VectorXd bu = B * u;
    const Eigen::VectorXd z = solver.solve(bu);
    const double nb = std::sqrt(std::max(0.0, z.dot(B * z)));
    if (!(nb > 0.0)) throw SolverError("inverse iteration degenerated (kernel of B)");
    u = z / nb;
    const Eigen::VectorXd au = A * u;
    lambda = u.dot(au);
    resid = (au - lambda * (B * u)).norm() / au.norm();
    if (iters >= 1 && resid <= config.tol_residual) break;
  }
  if (resid > config.tol_residual)
    throw SolverError("inverse iteration did not reach the residual tolerance");

  TraceEigenpair eig;
  eig.u = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    if (new_id[i] >= 0) eig.u[i] = u[new_id[i]];

  // sign convention: positive boundary mean
  double mean = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    mean += edge_weights[e] * 0.5 * (eig.u[be.n0] + eig.u[be.n1]);
  }
  if (mean < 0.0) eig.u = -eig.u;

  eig.lambda = lambda;
  eig.iterations = iters + 1;
  eig.residual = resid;
  return eig;
}

TraceEigenpair solve_p2(const TriMesh& mesh, const Eigen::VectorXd& edge_weights,
                        const std::vector<int>& pinned_nodes, const SolverConfig& config) {
  const auto A = build_p2_operator(mesh);
  const auto B = build_boundary_mass(mesh, edge_weights);
  return solve_p2(mesh, A, B, edge_weights, pinned_nodes, config);
}

// ---------------------------------------------------------------------------
// general p

TraceEigenpair solve_p_general(const TriMesh& mesh, const Eigen::VectorXd& edge_weights,
                               const std::vector<int>& pinned_nodes, double p,
                               const SolverConfig& config, const Eigen::VectorXd* init) {
  if (p < 2.0) throw ConfigError("solve_p_general requires p >= 2");
  const int n = mesh.num_nodes();
  std::vector<char> pinned(n, 0);
  for (int idx : pinned_nodes) pinned[idx] = 1;

  Eigen::VectorXd u;
  if (init) {
    u = *init;
    check_sizes(mesh, u);
  } else {
    u = solve_p2(mesh, edge_weights, pinned_nodes, config).u;
  }
  for (int i = 0; i < n; ++i)
    if (pinned[i]) u[i] = 0.0;

  auto project = [&](Eigen::VectorXd& v) {
    for (int i = 0; i < n; ++i)
      if (pinned[i]) v[i] = 0.0;
    const double norm = boundary_lp_norm(mesh, p, v, edge_weights);
    if (!(norm > 0.0)) throw SolverError("descent iterate lost its boundary norm");
    v /= norm;
  };
  project(u);

  double r = rayleigh_quotient(mesh, p, u, edge_weights);
  double step = 1.0;
  int iters = 0;
  double gnorm = 0.0;
  bool converged = false;
  for (; iters < config.max_iter; ++iters) {
    Eigen::VectorXd g = rayleigh_gradient(mesh, p, u, edge_weights);
    for (int i = 0; i < n; ++i)
      if (pinned[i]) g[i] = 0.0;
    gnorm = g.norm();
    if (gnorm <= 1e-13 * std::max(1.0, r)) {
      converged = true;
      break;
    }

    bool accepted = false;
    double t = step;
    for (int bt = 0; bt < config.max_backtracks; ++bt) {
      Eigen::VectorXd cand = u - t * g;
      project(cand);
      const double rc = rayleigh_quotient(mesh, p, cand, edge_weights);
      if (rc <= r - config.armijo_c * t * gnorm * gnorm) {
        const double drop = r - rc;
        u = cand;
        r = rc;
        step = 2.0 * t;
        accepted = true;
        if (drop <= config.tol_lambda * std::max(1.0, r)) converged = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) converged = true; // stationary to line-search resolution
    if (converged) break;
  }
  if (!converged) throw SolverError("projected gradient descent did not converge");

  // sign convention
  double mean = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    mean += edge_weights[e] * 0.5 * (u[be.n0] + u[be.n1]);
  }
  if (mean < 0.0) u = -u;

  TraceEigenpair eig;
  eig.lambda = r;
  eig.u = u;
  eig.iterations = iters;
  eig.residual = gnorm / std::max(1.0, r);
  return eig;
}

// ---------------------------------------------------------------------------
// pullback energy

double pullback_energy(const TriMesh& mesh, const PerturbationMap& map, double p,
                       const Eigen::VectorXd& v) {
  check_sizes(mesh, v);
  if (map.osc.is_zero()) return assemble_energy(mesh, p, v);

  std::vector<double> node_jinv(mesh.nodes.size(), -1.0);
  auto jinv_at = [&](const Eigen::Vector2d& y) {
    const Eigen::Vector2d x = apply_T_eps_inverse(map, y);
    const auto bundle = jacobian_at(map, x);
    if (bundle.DT.determinant() <= 0.0) throw MapError("pullback: map not orientation preserving");
    return 1.0 / bundle.J;
  };
  auto dt_at = [&](const Eigen::Vector2d& y) {
    const Eigen::Vector2d x = apply_T_eps_inverse(map, y);
    return jacobian_at(map, x);
  };

  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const TriGeom g = tri_geometry(mesh, t);
    const Eigen::Vector2d grad =
        v[t[0]] * g.grad_lambda[0] + v[t[1]] * g.grad_lambda[1] + v[t[2]] * g.grad_lambda[2];
    const Eigen::Vector2d& p0 = mesh.nodes[t[0]];
    const Eigen::Vector2d& p1 = mesh.nodes[t[1]];
    const Eigen::Vector2d& p2 = mesh.nodes[t[2]];
    for (const auto& q : kTriQuad) {
      const Eigen::Vector2d y = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
      const auto bundle = dt_at(y);
      if (bundle.DT.determinant() <= 0.0)
        throw MapError("pullback: map not orientation preserving");
      const Eigen::Vector2d gmapped = bundle.DT.transpose() * grad;
      total += g.area * q.w * std::pow(gmapped.norm(), p) / bundle.J;
    }
    for (int i = 0; i < 3; ++i) {
      double& cached = node_jinv[t[i]];
      if (cached < 0.0) cached = jinv_at(mesh.nodes[t[i]]);
      total += g.area / 3.0 * abs_pow(v[t[i]], p) * cached;
    }
  }
  return total;
}

OperatorCoefficients pullback_p2_coefficients(const PerturbationMap& map) {
  OperatorCoefficients coef;
  coef.gradient_coef = [map](const Eigen::Vector2d& y) {
    const Eigen::Vector2d x = apply_T_eps_inverse(map, y);
    const auto bundle = jacobian_at(map, x);
    if (bundle.DT.determinant() <= 0.0)
      throw MapError("pullback coefficients: map not orientation preserving");
    return Eigen::Matrix2d(bundle.DT * bundle.DT.transpose() / bundle.J);
  };
  coef.weight = [map](const Eigen::Vector2d& y) {
    const Eigen::Vector2d x = apply_T_eps_inverse(map, y);
    const auto bundle = jacobian_at(map, x);
    return 1.0 / bundle.J;
  };
  return coef;
}

// ---------------------------------------------------------------------------
// point location / interpolation

P1Interpolator::P1Interpolator(const TriMesh& mesh) : mesh_(mesh) {
  Eigen::Vector2d hi = mesh.nodes[0];
  lo_ = mesh.nodes[0];
  for (const auto& n : mesh.nodes) {
    lo_ = lo_.cwiseMin(n);
    hi = hi.cwiseMax(n);
  }
  cell_ = std::max(mesh.h, 1e-6);
  nx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - lo_.x()) / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - lo_.y()) / cell_)));
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  auto clampi = [](int v, int n) { return std::min(std::max(v, 0), n - 1); };
  for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    const auto& t = mesh.triangles[ti];
    Eigen::Vector2d tlo = mesh.nodes[t[0]], thi = mesh.nodes[t[0]];
    for (int i = 1; i < 3; ++i) {
      tlo = tlo.cwiseMin(mesh.nodes[t[i]]);
      thi = thi.cwiseMax(mesh.nodes[t[i]]);
    }
    const int i0 = clampi(static_cast<int>((tlo.x() - lo_.x()) / cell_), nx_);
    const int i1 = clampi(static_cast<int>((thi.x() - lo_.x()) / cell_), nx_);
    const int j0 = clampi(static_cast<int>((tlo.y() - lo_.y()) / cell_), ny_);
    const int j1 = clampi(static_cast<int>((thi.y() - lo_.y()) / cell_), ny_);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j)
        buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(ti));
  }
}

double P1Interpolator::operator()(const Eigen::VectorXd& u, const Eigen::Vector2d& x) const {
  auto clampi = [](int v, int n) { return std::min(std::max(v, 0), n - 1); };
  const int ci = clampi(static_cast<int>((x.x() - lo_.x()) / cell_), nx_);
  const int cj = clampi(static_cast<int>((x.y() - lo_.y()) / cell_), ny_);

  double best_val = 0.0;
  double best_score = -1e300;
  for (int ring = 0; ring < std::max(nx_, ny_); ++ring) {
    bool any = false;
    for (int i = std::max(0, ci - ring); i <= std::min(nx_ - 1, ci + ring); ++i) {
      for (int j = std::max(0, cj - ring); j <= std::min(ny_ - 1, cj + ring); ++j) {
        if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
        for (int ti : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
          any = true;
          const auto& t = mesh_.triangles[ti];
          const Eigen::Vector2d& p0 = mesh_.nodes[t[0]];
          const Eigen::Vector2d& p1 = mesh_.nodes[t[1]];
          const Eigen::Vector2d& p2 = mesh_.nodes[t[2]];
          const double det = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
          const double l1 =
              ((x - p0).x() * (p2 - p0).y() - (x - p0).y() * (p2 - p0).x()) / det;
          const double l2 =
              ((p1 - p0).x() * (x - p0).y() - (p1 - p0).y() * (x - p0).x()) / det;
          const double l0 = 1.0 - l1 - l2;
          const double score = std::min({l0, l1, l2});
          if (score > best_score) {
            best_score = score;
            const double c0 = std::clamp(l0, 0.0, 1.0);
            const double c1 = std::clamp(l1, 0.0, 1.0);
            const double c2 = std::clamp(l2, 0.0, 1.0);
            const double s = c0 + c1 + c2;
            best_val = (c0 * u[t[0]] + c1 * u[t[1]] + c2 * u[t[2]]) / s;
          }
        }
      }
    }
    if (best_score >= -1e-12) break; // found a containing triangle
    if (any && ring >= 2) break;     // nearest candidate wins for outside points
  }
  return best_val;
}

// ---------------------------------------------------------------------------
// export

void write_eigenpair_csv(const TriMesh& mesh, const TraceEigenpair& eig,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open eigenpair output file: " + path);
  out << "node,x,y,u\n";
  char buf[160];
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g\n", i, mesh.nodes[i].x(),
                  mesh.nodes[i].y(), eig.u[i]);
    out << buf;
  }
  if (!out) throw Error("failed writing eigenpair csv: " + path);
}

void write_eigenpair_summary_json(const TraceEigenpair& eig, double p, double alpha,
                                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open summary output file: " + path);
  const char* measure = eig.measure_id == BoundaryMeasureId::Surface
                            ? "surface"
                            : (eig.measure_id == BoundaryMeasureId::WeightedMuStar
                                   ? "mu_star"
                                   : "mu_eps");
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "{\n  \"lambda\": %.12g,\n  \"p\": %.12g,\n  \"alpha\": %.12g,\n"
                "  \"measure\": \"%s\",\n  \"iterations\": %d,\n  \"residual\": %.12g\n}\n",
                eig.lambda, p, alpha, measure, eig.iterations, eig.residual);
  out << buf;
  if (!out) throw Error("failed writing summary json: " + path);
}

} // namespace steklov
