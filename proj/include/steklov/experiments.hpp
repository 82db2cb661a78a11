#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "steklov/fem.hpp"
#include "steklov/geometry.hpp"
#include "steklov/measures.hpp"
#include "steklov/windows.hpp"

namespace steklov {

struct SweepConfig {
  double a = 1.0;   // amplitude exponent (regime selector)
  double alpha = 0.3;
  double p = 2.0;
  std::vector<int> ks = {4, 8, 16, 32};
  double h_floor = 1.0 / 512;
  unsigned seed = 1234;
  int restarts = 3;
  ProfileKind profile = ProfileKind::SinSquared;
  std::vector<double> fourier_cos, fourier_sin;
  ChartFn phi;
  std::string output; // csv path, empty = in-memory only

  OscillationSpec osc() const;
  double h_of(double eps) const { return std::max(eps / 8.0, h_floor); }
  double h_ref() const; // min over the sweep of h(eps)
  SolverConfig solver() const;
};

struct SweepRow {
  int k = 0;
  double eps = 0.0;
  double lambda = 0.0;
  double ref_lambda = 0.0;
  double rel_gap = 0.0;
  double slope_running = 0.0;
  double delta_measure = 0.0; // mu_eps(Gamma_eps diff Gamma_ref), best reflection
  double weakstar_err = 0.0;  // max over f in {1, x, y} of the weak-measure gap
  double sub_bound = 0.0;     // subcritical witness quotient (a < 1 only)
  double sub_chat = 0.0;      // admissible constant for bound <= C^ eps^(1-a)
  int iterations = 0;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;
  double ref_lambda = 0.0; // lambda(alpha) for a > 1, lambda*(alpha) for a = 1
  double slope = 0.0, intercept = 0.0, residual = 0.0;
};

/// Full eps-sweep: per k builds Omega_eps, optimizes the window, and attaches
/// the measure diagnostics against the limit problem solved once at h_ref.
/// Rows run in parallel (STEKLOV_THREADS caps workers, 0 or unset = auto);
/// failures mark the row and do not abort the sweep.
SweepResult run_sweep(const SweepConfig& config);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

/// Least squares of log(lambda) against log(eps) over the last half of the
/// successful rows (the asymptotic regime); C estimate = exp(intercept).
RateFit fit_rate(const SweepResult& result);
RateFit fit_rate(const std::vector<std::pair<double, double>>& eps_lambda);

/// Explicit test function of the subcritical upper bound: phi = 0 within
/// delta of Gamma_{0,eps} (bottom + left wall + chart over [0, x_top]),
/// phi = 1 beyond 2 delta, linear in the distance in between.
struct SubcriticalWitness {
  double delta = 0.2;
  double x_top = 0.45;
  double p = 2.0;
  Eigen::VectorXd phi_values;
  double gamma0_measure = 0.0; // |Gamma_{0,eps}|
  double gamma1_measure = 0.0; // |Gamma_{1,eps}|, chart beyond x_top + 2 delta
  double area = 0.0;           // |Omega_eps|
  double c_delta = 0.0;        // sup |grad phi|^p = delta^(-p)
};

SubcriticalWitness build_subcritical_witness(const TriMesh& pert_mesh,
                                             const ChartedDomain& pert_dom, double alpha,
                                             double p, double delta = 0.2,
                                             double x_top = 0.45);

struct SubcriticalBoundResult {
  double bound = 0.0; // witness Rayleigh quotient on Omega_eps
  double c_hat = 0.0; // 2 (C(delta) + 1) |Omega_eps| / (mean_grad / 2)
};

SubcriticalBoundResult subcritical_bound(const TriMesh& pert_mesh,
                                         const SubcriticalWitness& witness, double p,
                                         double mean_grad);

/// Relative gap between the direct Omega_eps optimization and the pulled-back
/// optimization on Omega (same infimum in the continuum).
double compare_pullback(const SweepConfig& config, int k);

/// CSV with the fixed column order
///   k,eps,lambda,ref_lambda,rel_gap,slope_running,delta_measure,weakstar_err
/// plus a JSON sidecar of the configuration at path + ".json". Byte-stable
/// across reruns with the same seed.
void emit_report(const SweepResult& result, const std::string& path);

/// Parses a CSV produced by emit_report back into rows (diagnostic columns
/// only); used by the report subcommand to re-emit files.
SweepResult read_report(const std::string& csv_path);

} // namespace steklov
