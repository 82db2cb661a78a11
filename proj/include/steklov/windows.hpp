#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "steklov/fem.hpp"
#include "steklov/geometry.hpp"

namespace steklov {

/// Measurable boundary subset as per-edge fractions in [0, 1]; the greedy
/// constructions below produce at most one strictly fractional edge.
struct Window {
  Eigen::VectorXd fracs;
  double measure = 0.0; // sum frac_e * weight_e in the active measure
  double target = 0.0;  // alpha * total weight at construction time
};

Window empty_window(const TriMesh& mesh);

/// Contiguous arc of measure alpha * total starting at the given edge of the
/// boundary cycle (fractional tail edge).
Window make_arc_window(const TriMesh& mesh, const Eigen::VectorXd& weights, double alpha,
                       int anchor_edge);

/// Bathtub step: fill edges by ascending edge-average |u|^p until the target
/// measure is met; ties broken by ascending edge index.
Window bathtub_update(const TriMesh& mesh, const Eigen::VectorXd& u, double p, double alpha,
                      const Eigen::VectorXd& weights);

/// Dirichlet pinning: a boundary node is pinned when the Gamma-covered length
/// of its two adjacent edges exceeds half of their total length.
std::vector<int> pinned_nodes_majority(const TriMesh& mesh, const Window& window);

/// Measure of the per-edge fraction difference (window stability metric).
double window_distance(const Window& a, const Window& b, const Eigen::VectorXd& weights);

/// Solve the trace eigenproblem with the window's nodes pinned.
TraceEigenpair solve_with_window(const TriMesh& mesh, const Window& window,
                                 const Eigen::VectorXd& weights, double p,
                                 const SolverConfig& config,
                                 const OperatorCoefficients* coef = nullptr);

struct OptimizationStep {
  double lambda = 0.0;
  double window_measure = 0.0;
  int changed_edges = 0;
};

struct OptimizationTrace {
  std::vector<OptimizationStep> steps;
  double best_lambda = 0.0;
  int restarts = 0;
};

struct WindowOptimum {
  Window window;
  TraceEigenpair eig;
  OptimizationTrace trace;
};

/// Alternating solve / bathtub optimization of lambda(alpha). Contiguous
/// arcs are polled for the initial window (every anchor when the boundary
/// has at most 256 edges), then solve and bathtub steps alternate; a step
/// that increases lambda is rejected and restarted from an arc rotated by
/// one edge (up to `restarts` times). The returned lambda is an upper bound
/// for the infimum by construction.
WindowOptimum optimize_window(const TriMesh& mesh, double alpha, double p,
                              const Eigen::VectorXd& weights, const SolverConfig& config,
                              int restarts = 3, const OperatorCoefficients* coef = nullptr);

/// Same alternation against the homogenized measure d mu* = m dS, in both the
/// constraint and the denominator norm.
WindowOptimum solve_limit_problem(const TriMesh& mesh, const WeightField& weight, double alpha,
                                  double p, const SolverConfig& config, int restarts = 3);

void write_window_csv(const TriMesh& mesh, const Window& window, const std::string& path);
void write_window_summary_json(const WindowOptimum& opt, double alpha,
                               const std::string& path);

} // namespace steklov
