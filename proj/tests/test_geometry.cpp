#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "steklov/geometry.hpp"

using namespace steklov;

namespace {

constexpr double kPi = std::numbers::pi;

// Test-side oracle: adaptive Simpson, independent of the library quadrature.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int depth = 0) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double left = (m - a) / 6.0 * (fa + 4.0 * f(lm) + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * f(rm) + fb);
  if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1) +
         adaptive_simpson(f, m, b, 0.5 * tol, depth + 1);
}

double chart_arclength_oracle(const ChartFn& phi, const OscillationSpec& osc, double eps) {
  auto slope = [&](double x) {
    double s = phi.deriv(x);
    if (!osc.is_zero()) s += std::pow(eps, osc.a - 1.0) * osc.fprime(x / eps);
    return std::sqrt(1.0 + s * s);
  };
  // integrate cell by cell so the oscillation is resolved
  const int k = osc.is_zero() ? 1 : static_cast<int>(std::lround(1.0 / eps));
  double total = 0.0;
  for (int c = 0; c < k; ++c)
    total += adaptive_simpson(slope, static_cast<double>(c) / k,
                              static_cast<double>(c + 1) / k, 1e-13 / k);
  return total;
}

double polygon_area(const std::vector<Eigen::Vector2d>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

} // namespace

TEST_CASE("oscillation profiles") {
  const auto sin2 = OscillationSpec::sin_squared(1.0);
  CHECK(sin2.mean_grad == 2.0);
  CHECK(sin2.sup_f == 1.0);
  CHECK(sin2.f(0.0) == 0.0);
  CHECK(sin2.f(0.5) == doctest::Approx(1.0).epsilon(1e-14));

  // mean_grad oracle for sin^2: int_0^1 pi |sin(2 pi y)| dy = 2
  const double mg = adaptive_simpson(
      [&](double y) { return std::abs(sin2.fprime(y)); }, 0.0, 0.5, 1e-13);
  CHECK(2.0 * mg == doctest::Approx(2.0).epsilon(1e-10));

  const auto four = OscillationSpec::fourier(1.0, {0.3, -0.1}, {0.2});
  CHECK(four.f(0.0) == 0.0); // structural, bit-exact
  CHECK(four.f(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(four.mean_grad > 0.0);
  const double mg4 = adaptive_simpson(
      [&](double y) { return std::abs(four.fprime(y)); }, 0.0, 1.0, 1e-12);
  CHECK(four.mean_grad == doctest::Approx(mg4).epsilon(1e-7));

  CHECK(OscillationSpec::zero().is_zero());
  CHECK(OscillationSpec::zero().mean_grad == 0.0);
}

TEST_CASE("build_base_domain: unit square") {
  const auto dom = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 1.0 / 64);
  CHECK(dom.total_length == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(dom.chart_length == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(dom.polyline.front() == Eigen::Vector2d(0.0, 0.0));
  CHECK(polygon_area(dom.polyline) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("build_base_domain: unit disk circumference") {
  const auto coarse = build_base_domain(DomainKind::UnitDisk, ChartFn{}, 1.0 / 32);
  const auto fine = build_base_domain(DomainKind::UnitDisk, ChartFn{}, 1.0 / 64);
  CHECK(std::abs(coarse.total_length - 2.0 * kPi) < 1e-3);
  CHECK(std::abs(fine.total_length - 2.0 * kPi) <
        std::abs(coarse.total_length - 2.0 * kPi));
}

TEST_CASE("build_base_domain: sloped chart length") {
  ChartFn phi;
  phi.c1 = 0.1;
  const auto dom = build_base_domain(DomainKind::SquareTopChart, phi, 1.0 / 64);
  // affine chart is a straight segment: chords sum to sqrt(1.01) exactly
  CHECK(dom.chart_length == doctest::Approx(std::sqrt(1.01)).epsilon(1e-13));
  const double oracle =
      adaptive_simpson([&](double x) { return std::sqrt(1.0 + 0.01); }, 0.0, 1.0, 1e-14);
  CHECK(dom.chart_length == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("build_base_domain rejects bad resolution") {
  CHECK_THROWS_AS(build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 0.0), ConfigError);
}

TEST_CASE("build_perturbed_boundary: zero profile is the identity") {
  const auto base = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 1.0 / 64);
  const auto pert = build_perturbed_boundary(base, OscillationSpec::zero(), 1.0 / 8);
  REQUIRE(pert.polyline.size() == base.polyline.size());
  for (std::size_t i = 0; i < base.polyline.size(); ++i)
    CHECK(pert.polyline[i] == base.polyline[i]);
}

TEST_CASE("build_perturbed_boundary: chart length vs quadrature oracle") {
  const auto base = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 1.0 / 512);
  const auto osc = OscillationSpec::sin_squared(1.0);
  const double eps = 1.0 / 8;
  const auto pert = build_perturbed_boundary(base, osc, eps);

  const double oracle = chart_arclength_oracle(ChartFn{}, osc, eps);
  CHECK(pert.chart_length == doctest::Approx(oracle).epsilon(5e-4));

  const auto lib = perturbed_chart_length(ChartFn{}, osc, eps);
  CHECK(lib.length == doctest::Approx(oracle).epsilon(1e-10));

  // polyline converges to the smooth arclength as sampling refines
  const auto base_fine = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 1.0 / 2048);
  const auto pert_fine = build_perturbed_boundary(base_fine, osc, eps);
  CHECK(std::abs(pert_fine.chart_length - oracle) < std::abs(pert.chart_length - oracle));
}

TEST_CASE("build_perturbed_boundary: subcritical length lower bound") {
  // |Gamma_eps| >= eps^(a-1) * mean_grad / 2 with the full chart
  const auto base = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 1.0 / 64);
  const auto osc = OscillationSpec::sin_squared(0.5);
  const double eps = 1.0 / 64;
  const auto pert = build_perturbed_boundary(base, osc, eps);
  const double lower = std::pow(eps, osc.a - 1.0) * osc.mean_grad / 2.0;
  CHECK(lower == doctest::Approx(8.0));
  CHECK(pert.chart_length >= lower);
}

TEST_CASE("build_perturbed_boundary: bit-exact cell boundaries") {
  ChartFn phi;
  phi.c1 = 0.25;
  const auto base = build_base_domain(DomainKind::SquareTopChart, phi, 1.0 / 64);
  const auto osc = OscillationSpec::sin_squared(1.0);
  const auto pert = build_perturbed_boundary(base, osc, 1.0 / 8);

  // chart vertices run right-to-left from chart_begin
  for (int i = pert.chart_begin; i <= pert.chart_end; ++i) {
    const auto& v = pert.polyline[i];
    const double cell_pos = v.x() * 8.0;
    if (std::abs(cell_pos - std::round(cell_pos)) < 1e-15) {
      CHECK(v.y() == phi(v.x())); // bit-equal at cell boundaries
    }
  }
  CHECK(pert.polyline[pert.chart_begin].y() == phi(1.0));
  CHECK(pert.polyline[pert.chart_end].y() == phi(0.0));
}

TEST_CASE("build_perturbed_boundary: error paths") {
  const auto base = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 1.0 / 64);
  CHECK_THROWS_AS(build_perturbed_boundary(base, OscillationSpec::sin_squared(1.0), 0.3),
                  ConfigError);
  CHECK_THROWS_AS(build_perturbed_boundary(base, OscillationSpec::sin_squared(1.0), 1.0),
                  ConfigError);

  // profile dipping below the bottom edge: self-intersection
  ChartFn low;
  low.c0 = 0.4;
  const auto shallow = build_base_domain(DomainKind::SquareTopChart, low, 1.0 / 64);
  const auto dip = OscillationSpec::fourier(0.5, {}, {-1.0});
  CHECK_THROWS_AS(build_perturbed_boundary(shallow, dip, 1.0 / 4), GeometryError);
}

TEST_CASE("generate_mesh: unit square, coarse") {
  const auto dom = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 0.25);
  const auto mesh = generate_mesh(dom, 0.25);

  double sum = 0.0;
  for (const auto& e : mesh.boundary_edges) sum += e.length;
  CHECK(sum == mesh.total_boundary_length);
  CHECK(mesh.total_boundary_length == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(mesh.area() == doctest::Approx(1.0).epsilon(1e-13));

  // all triangles positively oriented (generate_mesh would have thrown)
  CHECK(mesh.triangles.size() > 0);
}

TEST_CASE("generate_mesh: unit disk boundary length") {
  const auto dom = build_base_domain(DomainKind::UnitDisk, ChartFn{}, 0.05);
  const auto mesh = generate_mesh(dom, 0.05);
  CHECK(std::abs(mesh.total_boundary_length - 2.0 * kPi) / (2.0 * kPi) < 0.01);
  CHECK(mesh.area() == doctest::Approx(kPi).epsilon(0.01));
}

TEST_CASE("generate_mesh: perturbed square matches arclength oracle") {
  const auto base = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 1.0 / 64);
  const auto osc = OscillationSpec::sin_squared(1.0);
  const double eps = 1.0 / 8;
  const auto pert = build_perturbed_boundary(base, osc, eps);
  const auto mesh = generate_mesh(pert, 1.0 / 64);

  const double chart_oracle = chart_arclength_oracle(ChartFn{}, osc, eps);
  const double expected = chart_oracle + 3.0; // sides and bottom of the unit square
  CHECK(std::abs(mesh.total_boundary_length - expected) / expected < 0.01);

  // mesh boundary geometry equals the polyline
  CHECK(mesh.total_boundary_length == doctest::Approx(pert.total_length).epsilon(1e-10));
  CHECK(mesh.area() == doctest::Approx(polygon_area(pert.polyline)).epsilon(1e-10));
}

TEST_CASE("generate_mesh: h constraint for perturbed domains") {
  const auto base = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 1.0 / 64);
  const auto pert = build_perturbed_boundary(base, OscillationSpec::sin_squared(1.0), 1.0 / 8);
  CHECK_THROWS_AS(generate_mesh(pert, 0.25), ConfigError);
}

TEST_CASE("generate_mesh: boundary cycle is closed and tagged") {
  const auto base = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 1.0 / 16);
  const auto mesh = generate_mesh(base, 1.0 / 16);
  int chart_edges = 0;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == EdgeTag::Chart) {
      ++chart_edges;
      CHECK(mesh.nodes[e.n0].y() == doctest::Approx(1.0));
    }
  }
  CHECK(chart_edges >= 16);
  double chart_len = 0.0;
  for (const auto& e : mesh.boundary_edges)
    if (e.tag == EdgeTag::Chart) chart_len += e.length;
  CHECK(chart_len == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("refine_uniform is nested and consistent") {
  const auto dom = build_base_domain(DomainKind::SquareTopChart, ChartFn{}, 0.25);
  const auto mesh = generate_mesh(dom, 0.25);
  const auto fine = refine_uniform(mesh);
  CHECK(fine.triangles.size() == 4 * mesh.triangles.size());
  CHECK(fine.area() == doctest::Approx(mesh.area()).epsilon(1e-13));
  CHECK(fine.total_boundary_length ==
        doctest::Approx(mesh.total_boundary_length).epsilon(1e-13));
  // coarse nodes appear unchanged at the head of the fine node list
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) CHECK(fine.nodes[i] == mesh.nodes[i]);
}

TEST_CASE("perturbed_chart_length: flat and one-cell exactness") {
  ChartFn phi;
  phi.c1 = 0.7;
  const auto flat = perturbed_chart_length(phi, OscillationSpec::zero(), 1.0 / 8);
  CHECK(flat.length == doctest::Approx(std::sqrt(1.0 + 0.49)).epsilon(1e-12));

  // a = 1, phi' = 0: the integral is eps-independent (exact change of variables)
  const auto osc = OscillationSpec::sin_squared(1.0);
  const double ref = chart_arclength_oracle(ChartFn{}, osc, 1.0 / 4);
  for (const double eps : {1.0 / 4, 1.0 / 8, 1.0 / 32}) {
    const auto r = perturbed_chart_length(ChartFn{}, osc, eps);
    CHECK(r.length == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("perturbed_chart_length: rho bound (paper estimate)") {
  // |rho_eps| <= eps^(1-a) (1 + |phi'|) pointwise, all subcritical exponents
  for (const double a : {0.25, 0.5, 0.75}) {
    for (const double eps : {1.0 / 4, 1.0 / 16, 1.0 / 64}) {
      for (const double slope : {0.0, 0.5, -1.0}) {
        ChartFn phi;
        phi.c1 = slope;
        const auto r = perturbed_chart_length(phi, OscillationSpec::sin_squared(a), eps);
        CHECK(r.rho_max <= r.rho_bound + 1e-12);
      }
    }
  }
  // concrete case from the estimate: a = 0.5, eps = 1/16
  const auto r = perturbed_chart_length(ChartFn{}, OscillationSpec::sin_squared(0.5), 1.0 / 16);
  CHECK(r.rho_max <= std::pow(1.0 / 16, 0.5) * (1.0 + 0.0) + 1e-12);
}
