#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "steklov/geometry.hpp"
#include "steklov/transforms.hpp"
#include "steklov/windows.hpp"

namespace steklov {

enum class MeasureKind { Surface, MuEps, MuStar, NuEps, NuStar };

/// Per-edge weights of a boundary measure on a fixed discretization.
struct DiscreteBoundaryMeasure {
  MeasureKind kind = MeasureKind::Surface;
  double eps = 0.0; // MuEps / NuEps only
  Eigen::VectorXd w;
  double total() const { return w.sum(); }
};

DiscreteBoundaryMeasure surface_measure(const TriMesh& mesh);

/// d mu* = m dS on the chart, dS elsewhere.
DiscreteBoundaryMeasure mu_star_measure(const TriMesh& mesh, const WeightField& field);

/// d mu_eps = J_tau T_eps^{-1} dS realized discretely: each base chart edge
/// carries the perturbed polyline arclength over its x-range (off-chart edges
/// keep their surface weight, T_eps being the identity there). Using the
/// polyline keeps the measure bookkeeping exactly consistent with windows
/// computed on the perturbed mesh.
DiscreteBoundaryMeasure mu_eps_measure(const TriMesh& base_mesh,
                                       const ChartedDomain& pert_domain);

/// d nu = chi_window d mu.
DiscreteBoundaryMeasure window_measure(const DiscreteBoundaryMeasure& mu, const Window& window,
                                       MeasureKind kind);

/// Transports a window on the perturbed boundary to the base discretization
/// through T_eps (chart x-intervals are invariant, off-chart arcs are fixed).
/// The returned measure field is the exact perturbed arclength of the
/// transported set, so it matches the source window's measure.
Window pullback_window(const TriMesh& pert_mesh, const Window& gamma_eps,
                       const TriMesh& base_mesh);

/// Measure of A (Delta) B via per-edge fraction arithmetic.
double symmetric_difference_measure(const Window& a, const Window& b,
                                    const DiscreteBoundaryMeasure& mu);

/// Mirror image of a window under the square's x -> 1-x reflection,
/// rasterized on the same mesh.
Window reflect_window(const TriMesh& mesh, const Window& window,
                      const DiscreteBoundaryMeasure& mu);

/// Measure of the region where 0 < edge-average |u| <= 1/j.
double small_value_mass(const TriMesh& mesh, const Eigen::VectorXd& u, int j,
                        const DiscreteBoundaryMeasure& mu);

struct WeakMeasureResult {
  double total = 0.0; // | int f d nu_eps - int f d nu* |
  double term_window = 0.0;   // A_eps: window mismatch against mu_eps
  double term_transport = 0.0; // B_eps: f o T^{-1} - f against mu_eps
  double term_measure = 0.0;  // C_eps: d mu_eps - d mu* on the limit window
};

/// Three-term split of int f d nu_eps - int f d nu*, everything evaluated on
/// the base discretization (the nu_eps side through T_eps^{-1}).
WeakMeasureResult weak_measure_test(const std::function<double(const Eigen::Vector2d&)>& f,
                                    const TriMesh& base_mesh, const Window& gamma_eps_pulled,
                                    const DiscreteBoundaryMeasure& mu_eps,
                                    const Window& gamma_star,
                                    const DiscreteBoundaryMeasure& mu_star,
                                    const PerturbationMap& map);

} // namespace steklov
