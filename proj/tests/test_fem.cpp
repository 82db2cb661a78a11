#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "steklov/fem.hpp"

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd surface_weights(const TriMesh& mesh) {
  Eigen::VectorXd w(mesh.boundary_edges.size());
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
    w[i] = mesh.boundary_edges[i].length;
  return w;
}

std::vector<int> all_boundary_nodes(const TriMesh& mesh) {
  std::vector<int> nodes;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (mesh.on_boundary(i)) nodes.push_back(i);
  return nodes;
}

// Radial oracle for the no-window disk eigenvalue: integrate
// u'' + u'/r - u = 0 outward from the series at r ~ 0 and read off
// lambda = u'(1)/u(1).
double disk_radial_oracle() {
  double r = 1e-4;
  double u = 1.0 + r * r / 4.0 + std::pow(r, 4) / 64.0;
  double v = r / 2.0 + std::pow(r, 3) / 16.0; // u'
  const int steps = 200000;
  const double h = (1.0 - r) / steps;
  auto rhs = [](double rr, double uu, double vv) {
    return std::pair<double, double>(vv, uu - vv / rr);
  };
  for (int i = 0; i < steps; ++i) {
    const auto [k1u, k1v] = rhs(r, u, v);
    const auto [k2u, k2v] = rhs(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
    const auto [k3u, k3v] = rhs(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
    const auto [k4u, k4v] = rhs(r + h, u + h * k3u, v + h * k3v);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    r += h;
  }
  return v / u;
}

TriMesh unit_square_mesh(double h) {
  const auto dom = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, h);
  return generate_mesh(dom, h);
}

} // namespace

TEST_CASE("assemble_energy: exact values on the unit square") {
  const auto mesh = unit_square_mesh(1.0 / 16);
  const int n = mesh.num_nodes();

  CHECK(assemble_energy(mesh, 2.0, Eigen::VectorXd::Zero(n)) == 0.0);
  CHECK(assemble_energy(mesh, 2.0, Eigen::VectorXd::Ones(n)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // u = x: gradient term exactly 1, vertex-rule mass approximates 1/3
  Eigen::VectorXd ux(n);
  for (int i = 0; i < n; ++i) ux[i] = mesh.nodes[i].x();
  const double q = assemble_energy(mesh, 2.0, ux);
  CHECK(std::abs(q - (1.0 + 1.0 / 3.0)) < 2e-3);

  // quadrature error of the vertex rule decays at second order
  const auto fine = refine_uniform(mesh);
  Eigen::VectorXd uxf(fine.num_nodes());
  for (int i = 0; i < fine.num_nodes(); ++i) uxf[i] = fine.nodes[i].x();
  const double qf = assemble_energy(fine, 2.0, uxf);
  CHECK(std::abs(qf - 4.0 / 3.0) < 0.3 * std::abs(q - 4.0 / 3.0));

  CHECK_THROWS_AS(assemble_energy(mesh, 2.0, Eigen::VectorXd::Zero(3)), ShapeError);
}

TEST_CASE("assemble_energy: p-homogeneity") {
  const auto mesh = unit_square_mesh(1.0 / 8);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  Eigen::VectorXd u(mesh.num_nodes());
  for (int i = 0; i < u.size(); ++i) u[i] = ur(rng);
  for (const double p : {2.0, 2.5, 3.0}) {
    const double t = 3.7;
    const double lhs = assemble_energy(mesh, p, t * u);
    const double rhs = std::pow(t, p) * assemble_energy(mesh, p, u);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("boundary_lp_norm values") {
  const auto mesh = unit_square_mesh(1.0 / 16);
  const auto w = surface_weights(mesh);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_nodes());
  for (const double p : {2.0, 3.0}) {
    CHECK(boundary_lp_norm(mesh, p, ones, w) ==
          doctest::Approx(std::pow(4.0, 1.0 / p)).epsilon(1e-12));
  }

  // homogeneity
  CHECK(boundary_lp_norm(mesh, 3.0, 2.0 * ones, w) ==
        doctest::Approx(2.0 * std::pow(4.0, 1.0 / 3.0)).epsilon(1e-12));

  Eigen::VectorXd bad = w;
  bad[0] = -1.0;
  CHECK_THROWS_AS(boundary_lp_norm(mesh, 2.0, ones, bad), MeasureError);

  const auto disk_dom = build_base_domain(DomainKind::UnitDisk, ChartFn{}, 0.05);
  const auto disk = generate_mesh(disk_dom, 0.05);
  const Eigen::VectorXd dones = Eigen::VectorXd::Ones(disk.num_nodes());
  const double val = boundary_lp_norm(disk, 2.0, dones, surface_weights(disk));
  CHECK(std::abs(val - std::sqrt(2.0 * kPi)) / std::sqrt(2.0 * kPi) < 0.01);
}

TEST_CASE("solve_p2: disk against the radial shooting oracle") {
  const auto dom = build_base_domain(DomainKind::UnitDisk, ChartFn{}, 0.02);
  const auto mesh = generate_mesh(dom, 0.02);
  const auto w = surface_weights(mesh);
  SolverConfig config;
  const auto eig = solve_p2(mesh, w, {}, config);

  const double oracle = disk_radial_oracle();
  CHECK(std::abs(eig.lambda - oracle) / oracle < 0.005);

  // Rayleigh identity at the returned normalization
  const double q = assemble_energy(mesh, 2.0, eig.u);
  CHECK(eig.lambda == doctest::Approx(q).epsilon(1e-8));
  CHECK(boundary_lp_norm(mesh, 2.0, eig.u, w) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eig.residual <= config.tol_residual);

  // positive boundary mean sign convention: ground state is positive
  CHECK(eig.u.minCoeff() > 0.0);
}

TEST_CASE("solve_p2: infeasible when the window is the whole boundary") {
  const auto mesh = unit_square_mesh(0.25);
  CHECK_THROWS_AS(solve_p2(mesh, surface_weights(mesh), all_boundary_nodes(mesh), SolverConfig{}),
                  InfeasibleError);
}

TEST_CASE("solve_p2: conforming monotonicity under nested refinement") {
  const auto coarse = unit_square_mesh(0.25);
  const auto fine = refine_uniform(coarse);
  SolverConfig config;
  const double l_coarse = solve_p2(coarse, surface_weights(coarse), {}, config).lambda;
  const double l_fine = solve_p2(fine, surface_weights(fine), {}, config).lambda;
  CHECK(l_fine <= l_coarse + 1e-12);
}

TEST_CASE("solve_p2: pinned boundary raises the eigenvalue") {
  const auto mesh = unit_square_mesh(0.125);
  const auto w = surface_weights(mesh);
  SolverConfig config;
  const double l_free = solve_p2(mesh, w, {}, config).lambda;

  std::vector<int> pinned;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (mesh.on_boundary(i) && mesh.nodes[i].y() == 0.0) pinned.push_back(i);
  const auto eig = solve_p2(mesh, w, pinned, config);
  CHECK(eig.lambda > l_free);
  for (int i : pinned) CHECK(eig.u[i] == 0.0);
}

TEST_CASE("solve_p2: deterministic given the seed") {
  const auto mesh = unit_square_mesh(0.125);
  const auto w = surface_weights(mesh);
  SolverConfig config;
  const auto e1 = solve_p2(mesh, w, {}, config);
  const auto e2 = solve_p2(mesh, w, {}, config);
  CHECK(e1.lambda == e2.lambda);
  CHECK(e1.u == e2.u);
}

TEST_CASE("solve_p_general: agrees with solve_p2 at p = 2") {
  const auto mesh = unit_square_mesh(0.125);
  const auto w = surface_weights(mesh);
  SolverConfig config;
  const auto quad = solve_p2(mesh, w, {}, config);
  const auto desc = solve_p_general(mesh, w, {}, 2.0, config);
  CHECK(std::abs(desc.lambda - quad.lambda) / quad.lambda < 1e-6);
}

TEST_CASE("solve_p_general: analytic gradient vs central differences (p = 3)") {
  const auto mesh = unit_square_mesh(0.25);
  const auto w = surface_weights(mesh);
  const int n = mesh.num_nodes();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ur(0.2, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u[i] = ur(rng);
    const Eigen::VectorXd g = rayleigh_gradient(mesh, 3.0, u, w);
    Eigen::VectorXd fd(n);
    const double eta = 1e-5;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd up = u, dn = u;
      up[i] += eta;
      dn[i] -= eta;
      fd[i] = (rayleigh_quotient(mesh, 3.0, up, w) - rayleigh_quotient(mesh, 3.0, dn, w)) /
              (2.0 * eta);
    }
    CHECK((g - fd).norm() / fd.norm() <= 1e-5);
  }
}

TEST_CASE("solve_p_general: p = 3 solve and scaling invariance") {
  const auto mesh = unit_square_mesh(0.125);
  const auto w = surface_weights(mesh);
  SolverConfig config;
  const auto base = solve_p_general(mesh, w, {}, 3.0, config);
  CHECK(base.lambda > 0.0);

  // Rayleigh identity under the returned normalization
  CHECK(boundary_lp_norm(mesh, 3.0, base.u, w) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(assemble_energy(mesh, 3.0, base.u) == doctest::Approx(base.lambda).epsilon(1e-8));

  // p-homogeneity of the quotient: scaling leaves it bit-level invariant
  CHECK(rayleigh_quotient(mesh, 3.0, 10.0 * base.u, w) ==
        doctest::Approx(base.lambda).epsilon(1e-12));

  // initial guess scaling does not change the computed minimum
  Eigen::VectorXd init = base.u * 10.0;
  const auto scaled = solve_p_general(mesh, w, {}, 3.0, config, &init);
  CHECK(std::abs(scaled.lambda - base.lambda) / base.lambda < 1e-6);
}

TEST_CASE("pullback_energy: identity cases") {
  const auto mesh = unit_square_mesh(1.0 / 16);
  const int n = mesh.num_nodes();
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = ur(rng);

  // zero profile: exact equality
  PerturbationMap none(ChartFn{}, OscillationSpec::zero(), 1.0 / 8);
  CHECK(pullback_energy(mesh, none, 2.0, v) == assemble_energy(mesh, 2.0, v));

  // deep interior support: T = id there, so the energies agree to roundoff
  PerturbationMap map(ChartFn{}, OscillationSpec::sin_squared(1.0), 1.0 / 16);
  Eigen::VectorXd vd = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const auto& p = mesh.nodes[i];
    if (p.y() < 0.5) vd[i] = std::sin(2.0 * p.x()) + 0.3 * p.y();
  }
  const double qp = pullback_energy(mesh, map, 2.0, vd);
  const double q = assemble_energy(mesh, 2.0, vd);
  CHECK(qp == doctest::Approx(q).epsilon(1e-13));
}

TEST_CASE("pullback operator matches pullback_energy at p = 2") {
  // same quadrature on both paths: v^T A v must equal the scalar energy
  const double eps = 1.0 / 8;
  const auto dom = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, eps / 8.0);
  const auto mesh = generate_mesh(dom, eps / 8.0);
  PerturbationMap map(ChartFn{}, OscillationSpec::sin_squared(1.0), eps);
  const auto coef = pullback_p2_coefficients(map);
  const auto A = build_p2_operator(mesh, &coef);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  Eigen::VectorXd v(mesh.num_nodes());
  for (int i = 0; i < v.size(); ++i) v[i] = ur(rng);
  const double quadratic = v.dot(A * v);
  const double energy = pullback_energy(mesh, map, 2.0, v);
  CHECK(quadratic == doctest::Approx(energy).epsilon(1e-12));
}

TEST_CASE("pullback_energy: change-of-variables identity") {
  // Q~_eps(u_eps o T_eps) should reproduce Q_eps(u_eps) up to quadrature
  const double eps = 1.0 / 8;
  const auto base = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 1.0 / 128);
  const auto pert_dom = build_perturbed_boundary(base, OscillationSpec::sin_squared(1.0), eps);
  const auto pert_mesh = generate_mesh(pert_dom, eps / 16.0);
  SolverConfig config;
  const auto direct = solve_p2(pert_mesh, surface_weights(pert_mesh), {}, config);
  const double q_direct = assemble_energy(pert_mesh, 2.0, direct.u);

  const auto base_mesh = generate_mesh(base, eps / 16.0);
  PerturbationMap map(ChartFn{}, OscillationSpec::sin_squared(1.0), eps);
  P1Interpolator interp(pert_mesh);
  Eigen::VectorXd v(base_mesh.num_nodes());
  for (int i = 0; i < base_mesh.num_nodes(); ++i)
    v[i] = interp(direct.u, apply_T_eps_inverse(map, base_mesh.nodes[i]));

  const double q_pull = pullback_energy(base_mesh, map, 2.0, v);
  CHECK(std::abs(q_pull - q_direct) / q_direct < 0.01);
}
