#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "steklov/geometry.hpp"
#include "steklov/transforms.hpp"

namespace steklov {

enum class BoundaryMeasureId { Surface, WeightedMuStar, PulledBackMuEps };

struct SolverConfig {
  double tol_lambda = 1e-8;   // relative eigenvalue increment
  double tol_residual = 1e-8; // relative Euler-Lagrange residual (p = 2)
  int max_iter = 500;
  unsigned seed = 1234;
  double armijo_c = 1e-4;
  int max_backtracks = 48;
};

/// Eigenpair of the trace quotient. u spans all mesh nodes, window nodes are
/// pinned to zero and the boundary L^p norm in the active measure equals 1,
/// so lambda = Q(u) (Rayleigh identity).
struct TraceEigenpair {
  double lambda = 0.0;
  Eigen::VectorXd u;
  BoundaryMeasureId measure_id = BoundaryMeasureId::Surface;
  int iterations = 0;
  double residual = 0.0;
};

/// Spatially varying p = 2 coefficients, used for energies pulled back
/// through a domain diffeomorphism. gradient_coef is the complete gradient
/// integrand matrix (any volume weight folded in); weight scales only the
/// mass term.
struct OperatorCoefficients {
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> gradient_coef;
  std::function<double(const Eigen::Vector2d&)> weight;
};

// --- energies -------------------------------------------------------------

/// Q(u) = int |grad u|^p + |u|^p: exact per-element gradient term, vertex
/// quadrature for the mass term.
double assemble_energy(const TriMesh& mesh, double p, const Eigen::VectorXd& u);
Eigen::VectorXd energy_gradient(const TriMesh& mesh, double p, const Eigen::VectorXd& u);

/// Simpson-per-edge boundary integral of |u|^p against the given edge
/// weights; returns the p-th root.
double boundary_lp_norm(const TriMesh& mesh, double p, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& edge_weights);
double boundary_lp_power(const TriMesh& mesh, double p, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& edge_weights);
Eigen::VectorXd boundary_lp_power_gradient(const TriMesh& mesh, double p,
                                           const Eigen::VectorXd& u,
                                           const Eigen::VectorXd& edge_weights);

/// Rayleigh quotient R = Q / N and its gradient (N = boundary p-power).
double rayleigh_quotient(const TriMesh& mesh, double p, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& edge_weights);
Eigen::VectorXd rayleigh_gradient(const TriMesh& mesh, double p, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& edge_weights);

// --- p = 2 matrices and eigensolver ----------------------------------------

/// Full stiffness-plus-lumped-mass matrix (optionally coefficient weighted).
Eigen::SparseMatrix<double> build_p2_operator(const TriMesh& mesh,
                                              const OperatorCoefficients* coef = nullptr);

/// Boundary mass with Simpson edge blocks (w_e/6) [[2,1],[1,2]].
Eigen::SparseMatrix<double> build_boundary_mass(const TriMesh& mesh,
                                                const Eigen::VectorXd& edge_weights);

/// Smallest eigenpair of A u = lambda B u with the pinned nodes eliminated,
/// by inverse iteration on the reduced pencil. Deterministic given the seed.
TraceEigenpair solve_p2(const TriMesh& mesh, const Eigen::SparseMatrix<double>& A_full,
                        const Eigen::SparseMatrix<double>& B_full,
                        const Eigen::VectorXd& edge_weights,
                        const std::vector<int>& pinned_nodes, const SolverConfig& config);

/// Convenience overload assembling the standard operator.
TraceEigenpair solve_p2(const TriMesh& mesh, const Eigen::VectorXd& edge_weights,
                        const std::vector<int>& pinned_nodes, const SolverConfig& config);

/// Projected steepest descent on the boundary-L^p unit sphere with Armijo
/// backtracking; initialized from the p = 2 eigenpair unless an explicit
/// start vector is supplied.
TraceEigenpair solve_p_general(const TriMesh& mesh, const Eigen::VectorXd& edge_weights,
                               const std::vector<int>& pinned_nodes, double p,
                               const SolverConfig& config,
                               const Eigen::VectorXd* init = nullptr);

// --- pulled-back energy -----------------------------------------------------

/// Q pulled back through T_eps: integrates
///   |grad v (DT o T^{-1})|^p J T^{-1} + |v|^p J T^{-1}
/// with a degree-5 rule for the gradient term and vertex quadrature for the
/// mass term, so it reduces to assemble_energy exactly when T = id.
double pullback_energy(const TriMesh& mesh, const PerturbationMap& map, double p,
                       const Eigen::VectorXd& v);

/// p = 2 coefficients of the pulled-back quadratic form.
OperatorCoefficients pullback_p2_coefficients(const PerturbationMap& map);

/// Bucketed point locator with P1 evaluation; queries outside the mesh snap
/// to the nearest candidate triangle (clamped barycentrics).
class P1Interpolator {
 public:
  explicit P1Interpolator(const TriMesh& mesh);
  double operator()(const Eigen::VectorXd& u, const Eigen::Vector2d& x) const;

 private:
  const TriMesh& mesh_;
  double cell_ = 0.0;
  Eigen::Vector2d lo_;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> buckets_;
};

// --- export ----------------------------------------------------------------

void write_eigenpair_csv(const TriMesh& mesh, const TraceEigenpair& eig,
                         const std::string& path);
void write_eigenpair_summary_json(const TraceEigenpair& eig, double p, double alpha,
                                  const std::string& path);

} // namespace steklov
