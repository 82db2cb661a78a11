#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "steklov/geometry.hpp"

namespace steklov {

/// Boundary-fitted diffeomorphism T_eps: Omega_eps -> Omega for square chart
/// domains. Moves only the vertical coordinate:
///   T(x, y) = (x, y - eps^a f(x/eps) phi_eps(x, y)),
/// where phi_eps = S(1 - d/sqrt(eps)) is a cubic smoothstep of the chart-layer
/// coordinate d (distance below the base chart, clamped to 1 on and above it).
/// The displacement therefore vanishes identically on the off-chart boundary
/// (f(0) = 0 at the walls, phi_eps = 0 at the bottom) and deep in the interior.
struct PerturbationMap {
  ChartFn phi;
  OscillationSpec osc;
  double eps = 0.0;
  double cutoff_width = 0.0; // sqrt(eps)

  /// sup |S'| of the smoothstep: |grad phi_eps| <= C / sqrt(eps).
  static constexpr double kCutoffGradConstant = 1.5;

  PerturbationMap(const ChartFn& phi_, const OscillationSpec& osc_, double eps_);

  double amplitude() const; // eps^a
  double slope_scale() const; // eps^(a-1)
};

/// Distance below the base chart in the chart-normal direction; negative on
/// and above the chart. This is the layer coordinate the cutoff decays in.
double chart_distance(const PerturbationMap& map, const Eigen::Vector2d& x);
Eigen::Vector2d chart_distance_grad(const PerturbationMap& map, const Eigen::Vector2d& x);

double cutoff_phi(const PerturbationMap& map, const Eigen::Vector2d& x);
Eigen::Vector2d cutoff_grad(const PerturbationMap& map, const Eigen::Vector2d& x);

Eigen::Vector2d apply_T_eps(const PerturbationMap& map, const Eigen::Vector2d& x);

/// Solves the scalar vertical equation for the preimage by safeguarded
/// Newton/bisection to 1e-12.
Eigen::Vector2d apply_T_eps_inverse(const PerturbationMap& map, const Eigen::Vector2d& y);

struct JacobianBundle {
  Eigen::Matrix2d DT = Eigen::Matrix2d::Identity();
  double J = 1.0;                // |det DT|
  std::optional<double> Jtau;    // tangential Jacobian, boundary points only
};

/// DT assembled from the rank structure DT = I - eps^a f A - eps^(a-1) phi B.
/// Jtau is filled when x lies on the perturbed chart (within 1e-9).
JacobianBundle jacobian_at(const PerturbationMap& map, const Eigen::Vector2d& x);

/// Tangential stretch of a given unit tangent under DT at x.
double tangential_jacobian(const JacobianBundle& bundle, const Eigen::Vector2d& tangent);

/// J_tau T_eps^{-1} evaluated at the base chart point (x, phi(x)).
double jtau_inverse_at_base_chart(const PerturbationMap& map, double x);

/// Image of a perturbed-domain mesh under T_eps: same connectivity, nodes
/// transported, boundary lengths recomputed (chart parameters are invariant).
/// Gives a boundary-layer-fitted triangulation of the base domain on which
/// pulled-back energies are resolved at the same scale as the direct mesh.
TriMesh map_mesh_through(const TriMesh& mesh, const PerturbationMap& map);

/// Homogenized weight m for a chart slope phi':
///   m = [ int_0^1 sqrt(1 + (phi' + f'(y))^2) dy ] / sqrt(1 + phi'^2),
/// composite Gauss-Legendre, panels doubled until successive values differ by
/// less than 1e-12. Returns exactly 1 for the zero profile.
double homogenized_weight(double phi_slope, const OscillationSpec& osc, int min_panels = 16);

/// Per-edge values of m on a mesh boundary (m = 1 off-chart) and the total
/// weighted length mu*(boundary).
struct WeightField {
  std::vector<double> edge_m;
  double total_weighted_length = 0.0;
};

WeightField build_weight_field(const TriMesh& mesh, const ChartFn& phi,
                               const OscillationSpec& osc);

struct WeakstarRow {
  int k = 0;
  double eps = 0.0;
  double error = 0.0;
};

/// Lemma-style weak-* diagnostic: for each eps = 1/k computes
///   | int_chart g Jtau T_eps^{-1} dS - int_chart g m dS |
/// by quadrature on the base chart.
std::vector<WeakstarRow> weakstar_test(const std::function<double(double)>& g,
                                       const std::vector<int>& ks,
                                       const OscillationSpec& osc, const ChartFn& phi);

void write_weakstar_csv(const std::vector<WeakstarRow>& rows, const std::string& g_id,
                        const std::string& path);

} // namespace steklov
