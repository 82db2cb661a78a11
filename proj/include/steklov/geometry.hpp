#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "steklov/errors.hpp"

namespace steklov {

enum class DomainKind { SquareTopChart, UnitDisk };

/// Height function of the chart edge over U' = (0, 1):
///   phi(x) = c0 + c1*x + c2*sin(pi*x) + c3*sin(2*pi*x).
/// The sine terms vanish at both endpoints, so the chart always meets the
/// side walls at heights c0 and c0 + c1.
struct ChartFn {
  double c0 = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  double operator()(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
  bool is_affine() const { return c2 == 0.0 && c3 == 0.0; }
};

enum class ProfileKind { SinSquared, Fourier };

/// Periodic oscillation profile on the unit cell Y' = [0, 1].
///
/// SinSquared is f(y) = sin^2(pi*y). Fourier profiles are stored as
///   f(y) = sum_j a_j (cos(2 pi j y) - 1) + sum_j b_j sin(2 pi j y),
/// which makes f(0) = f(1) = 0 hold exactly in floating point, so perturbed
/// charts meet the side walls bit-exactly at cell boundaries.
struct OscillationSpec {
  ProfileKind profile = ProfileKind::Fourier;
  double a = 1.0; // amplitude exponent
  std::vector<double> fourier_cos;
  std::vector<double> fourier_sin;

  // derived cell quantities
  double mean_grad = 0.0; // integral of |f'| over the cell
  double sup_f = 0.0;
  double sup_fprime = 0.0;

  static OscillationSpec zero(double a = 1.0);
  static OscillationSpec sin_squared(double a);
  static OscillationSpec fourier(double a, std::vector<double> cos_coeffs,
                                 std::vector<double> sin_coeffs);

  double f(double y) const;
  double fprime(double y) const;
  bool is_zero() const;
};

enum class EdgeTag { Chart, Other };

/// Which straight piece of the square boundary an edge lives on. Used as the
/// canonical parameterization shared by base and perturbed discretizations.
///   Bottom: t = x ascending, Right: t = y ascending,
///   Chart:  t = x (descending along the cycle), Left: t = y descending.
/// Disks use Circle with t = angle in [0, 2 pi).
enum class BoundaryPart { Bottom, Right, Chart, Left, Circle };

struct Perturbation {
  OscillationSpec osc;
  double eps = 0.0; // 1/k, integer k >= 2
};

/// Base or perturbed domain with its polyline boundary. The polyline is a
/// simple closed CCW curve; for squares it starts at (0,0) and the chart
/// portion is the contiguous segment range [chart_begin, chart_end).
struct ChartedDomain {
  DomainKind kind = DomainKind::SquareTopChart;
  ChartFn phi;
  std::optional<Perturbation> pert;

  std::vector<Eigen::Vector2d> polyline; // closed: segment i = (v[i], v[(i+1)%n])
  int chart_begin = -1;
  int chart_end = -1;
  double total_length = 0.0;
  double chart_length = 0.0;
  double resolution = 0.0;

  /// Height of the (possibly perturbed) chart over x.
  double top(double x) const;
  double top_deriv(double x) const;
  bool is_perturbed() const { return pert.has_value() && !pert->osc.is_zero(); }
};

struct BoundaryEdge {
  int n0 = -1, n1 = -1;
  double length = 0.0;
  EdgeTag tag = EdgeTag::Other;
  BoundaryPart part = BoundaryPart::Bottom;
  double t0 = 0.0, t1 = 0.0; // canonical parameter at edge start/end (cycle order)
};

struct TriMesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<Eigen::Vector3i> triangles;       // CCW
  std::vector<BoundaryEdge> boundary_edges;     // one closed cycle, CCW
  std::vector<int> boundary_nodes;              // cycle order, boundary_nodes[i] = edge[i].n0
  double h = 0.0;
  double total_boundary_length = 0.0;

  double area() const;
  int num_nodes() const { return static_cast<int>(nodes.size()); }
  bool on_boundary(int node) const; // via boundary_node_index
  /// -1 for interior nodes, else position in the boundary cycle.
  std::vector<int> boundary_node_index;
};

/// Result of the exact arclength quadrature of a (possibly perturbed) chart,
/// together with the residual check against the subcritical bound
/// |rho_eps(x)| <= eps^(1-a) (1 + |phi'(x)|).
struct ChartLengthResult {
  double length = 0.0;
  double rho_max = 0.0;   // max over quadrature points of |rho_eps|
  double rho_bound = 0.0; // max over quadrature points of the admissible bound
};

ChartedDomain build_base_domain(DomainKind kind, const ChartFn& phi, double resolution);

ChartedDomain build_perturbed_boundary(const ChartedDomain& domain,
                                       const OscillationSpec& osc, double eps);

TriMesh generate_mesh(const ChartedDomain& domain, double h);

ChartLengthResult perturbed_chart_length(const ChartFn& phi, const OscillationSpec& osc,
                                         double eps, int order = 16);

/// Red refinement: every triangle split in four through edge midpoints.
/// The refined P1 space contains the coarse one (nested).
TriMesh refine_uniform(const TriMesh& mesh);

/// OFF-like text export: counts header, then node lines, then triangle lines.
void write_mesh_off(const TriMesh& mesh, const std::string& path);

/// eps must be 1/k for integer k >= 2; returns k or throws ConfigError.
int checked_cell_count(double eps);

} // namespace steklov
