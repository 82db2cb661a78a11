#include "steklov/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace steklov {

namespace {

int worker_count(std::size_t jobs) {
  int cap = 0;
  if (const char* env = std::getenv("STEKLOV_THREADS")) cap = std::atoi(env);
  if (cap <= 0) cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap <= 0) cap = 1;
  return std::min<int>(cap, static_cast<int>(jobs));
}

Eigen::VectorXd surface_weights(const TriMesh& mesh) {
  Eigen::VectorXd w(mesh.boundary_edges.size());
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
    w[i] = mesh.boundary_edges[i].length;
  return w;
}

// perturbed-polyline arclength over a chart x-interval
double chart_length_over(const ChartedDomain& dom, double a, double b) {
  double len = 0.0;
  for (int i = dom.chart_begin; i < dom.chart_end; ++i) {
    const Eigen::Vector2d q0 = dom.polyline[i + 1]; // smaller x
    const Eigen::Vector2d q1 = dom.polyline[i];
    const double xa = q0.x(), xb = q1.x();
    const double cov = std::max(0.0, std::min(b, xb) - std::max(a, xa));
    if (cov > 0.0) len += (q1 - q0).norm() * cov / (xb - xa);
  }
  return len;
}

struct ReferenceProblem {
  ChartedDomain domain;
  TriMesh mesh;
  WindowOptimum opt;
  DiscreteBoundaryMeasure mu_ref; // surface or mu*
  double lambda = 0.0;
};

ReferenceProblem solve_reference(const SweepConfig& config) {
  ReferenceProblem ref;
  const double h = config.h_ref();
  ref.domain = build_base_domain(DomainKind::SquareTopChart, config.phi, h);
  ref.mesh = generate_mesh(ref.domain, h);
  const SolverConfig solver = config.solver();
  if (config.a == 1.0) {
    const auto field = build_weight_field(ref.mesh, config.phi, config.osc());
    ref.opt = solve_limit_problem(ref.mesh, field, config.alpha, config.p, solver,
                                  config.restarts);
    ref.mu_ref = mu_star_measure(ref.mesh, field);
  } else {
    const auto w = surface_weights(ref.mesh);
    ref.opt = optimize_window(ref.mesh, config.alpha, config.p, w, solver, config.restarts);
    ref.mu_ref = surface_measure(ref.mesh);
  }
  ref.lambda = ref.opt.eig.lambda;
  return ref;
}

double running_slope(std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 3) return std::nan("");
  return fit_rate(pts).slope;
}

} // namespace

OscillationSpec SweepConfig::osc() const {
  if (profile == ProfileKind::SinSquared) return OscillationSpec::sin_squared(a);
  return OscillationSpec::fourier(a, fourier_cos, fourier_sin);
}

double SweepConfig::h_ref() const {
  if (ks.empty()) throw ConfigError("sweep requires a non-empty k list");
  double h = 1e300;
  for (int k : ks) h = std::min(h, h_of(1.0 / k));
  return h;
}

SolverConfig SweepConfig::solver() const {
  SolverConfig s;
  s.seed = seed;
  return s;
}

SweepResult run_sweep(const SweepConfig& config) {
  if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) throw ConfigError("alpha out of range");
  if (!(config.a > 0.0)) throw ConfigError("regime exponent a must be positive");
  for (std::size_t i = 1; i < config.ks.size(); ++i)
    if (config.ks[i] <= config.ks[i - 1]) throw ConfigError("k list must be ascending");

  SweepResult result;
  result.config = config;
  const OscillationSpec osc = config.osc();
  const SolverConfig solver = config.solver();

  const ReferenceProblem ref = solve_reference(config);
  result.ref_lambda = ref.lambda;

  auto run_row = [&](int k) {
    SweepRow row;
    row.k = k;
    row.eps = 1.0 / k;
    row.ref_lambda = ref.lambda;
    try {
      const double h = config.h_of(row.eps);
      const auto base_k = build_base_domain(DomainKind::SquareTopChart, config.phi, h);
      const auto pert_dom = build_perturbed_boundary(base_k, osc, row.eps);
      const auto pert_mesh = generate_mesh(pert_dom, h);
      const auto w = surface_weights(pert_mesh);

      const auto opt =
          optimize_window(pert_mesh, config.alpha, config.p, w, solver, config.restarts);
      row.lambda = opt.eig.lambda;
      row.iterations = static_cast<int>(opt.trace.steps.size());
      row.rel_gap = std::abs(row.lambda - ref.lambda) / std::abs(ref.lambda);

      // window diagnostics against the limit window, on the reference mesh
      const auto mu_e = mu_eps_measure(ref.mesh, pert_dom);
      const auto pulled = pullback_window(pert_mesh, opt.window, ref.mesh);
      const auto mirrored = reflect_window(ref.mesh, pulled, mu_e);
      const double dd_direct =
          symmetric_difference_measure(pulled, ref.opt.window, mu_e);
      const double dd_mirror =
          symmetric_difference_measure(mirrored, ref.opt.window, mu_e);
      const Window& matched = (dd_mirror < dd_direct) ? mirrored : pulled;
      row.delta_measure = std::min(dd_direct, dd_mirror);

      PerturbationMap map(config.phi, osc, row.eps);
      const std::function<double(const Eigen::Vector2d&)> fns[3] = {
          [](const Eigen::Vector2d&) { return 1.0; },
          [](const Eigen::Vector2d& q) { return q.x(); },
          [](const Eigen::Vector2d& q) { return q.y(); }};
      row.weakstar_err = 0.0;
      for (const auto& f : fns) {
        const auto res =
            weak_measure_test(f, ref.mesh, matched, mu_e, ref.opt.window, ref.mu_ref, map);
        row.weakstar_err = std::max(row.weakstar_err, res.total);
      }

      if (config.a < 1.0) {
        const auto witness =
            build_subcritical_witness(pert_mesh, pert_dom, config.alpha, config.p);
        const auto bound = subcritical_bound(pert_mesh, witness, config.p, osc.mean_grad);
        row.sub_bound = bound.bound;
        row.sub_chat = bound.c_hat;
      } else {
        row.sub_bound = std::nan("");
        row.sub_chat = std::nan("");
      }
    } catch (const Error& err) {
      row.failed = true;
      row.error = err.what();
      row.lambda = std::nan("");
      row.rel_gap = std::nan("");
    }
    return row;
  };

  // parallel rows, merged in k order
  const int workers = worker_count(config.ks.size());
  result.rows.resize(config.ks.size());
  std::size_t next = 0;
  std::mutex mtx;
  auto drain = [&]() {
    while (true) {
      std::size_t mine;
      {
        std::lock_guard<std::mutex> lock(mtx);
        if (next >= config.ks.size()) return;
        mine = next++;
      }
      result.rows[mine] = run_row(config.ks[mine]);
    }
  };
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
  }

  // running slope column (depends on preceding rows only)
  std::vector<std::pair<double, double>> pts;
  for (auto& row : result.rows) {
    if (!row.failed && row.lambda > 0.0) pts.emplace_back(row.eps, row.lambda);
    row.slope_running = running_slope(pts);
  }

  const bool enough =
      std::count_if(result.rows.begin(), result.rows.end(),
                    [](const SweepRow& r) { return !r.failed && r.lambda > 0.0; }) >= 3;
  if (enough) {
    const RateFit fit = fit_rate(result);
    result.slope = fit.slope;
    result.intercept = fit.intercept;
    result.residual = fit.residual;
  } else {
    result.slope = result.intercept = result.residual = std::nan("");
  }

  if (!config.output.empty()) emit_report(result, config.output);
  return result;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& eps_lambda) {
  if (eps_lambda.size() < 3) throw InsufficientData("fit_rate needs at least 3 rows");
  // last ceil(n/2) points: the asymptotic regime (ks ascending = eps descending)
  const std::size_t n = eps_lambda.size();
  const std::size_t take = (n + 1) / 2;
  const std::size_t begin = n - take;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = begin; i < n; ++i) {
    const double x = std::log(eps_lambda[i].first);
    const double y = std::log(eps_lambda[i].second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(take);
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw InsufficientData("fit_rate: degenerate abscissae");
  RateFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss = 0.0;
  for (std::size_t i = begin; i < n; ++i) {
    const double x = std::log(eps_lambda[i].first);
    const double y = std::log(eps_lambda[i].second);
    const double r = y - (fit.slope * x + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

RateFit fit_rate(const SweepResult& result) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : result.rows)
    if (!row.failed && row.lambda > 0.0) pts.emplace_back(row.eps, row.lambda);
  return fit_rate(pts);
}

SubcriticalWitness build_subcritical_witness(const TriMesh& pert_mesh,
                                             const ChartedDomain& pert_dom, double alpha,
                                             double p, double delta, double x_top) {
  if (!(delta > 0.0)) throw ConfigError("witness delta must be positive");
  SubcriticalWitness wit;
  wit.delta = delta;
  wit.x_top = x_top;
  wit.p = p;
  wit.c_delta = std::pow(1.0 / delta, p);
  wit.area = pert_mesh.area();

  const double wall_height = pert_dom.phi(0.0);
  wit.gamma0_measure = 1.0 + wall_height + chart_length_over(pert_dom, 0.0, x_top);
  if (wit.gamma0_measure < alpha * pert_mesh.total_boundary_length)
    throw WitnessError("witness infeasible: |Gamma_0,eps| < alpha |dOmega_eps|");

  const double pad = 0.02;
  const double x1 = x_top + 2.0 * delta + pad;
  if (x1 >= 1.0) throw WitnessError("witness infeasible: Gamma_1 is empty");
  wit.gamma1_measure = chart_length_over(pert_dom, x1, 1.0);

  // chart segments of Gamma_{0,eps}, ascending in x, for distance queries
  std::vector<Eigen::Vector2d> seg_a, seg_b;
  for (int i = pert_dom.chart_end; i > pert_dom.chart_begin; --i) {
    const Eigen::Vector2d q0 = pert_dom.polyline[i];     // smaller x
    const Eigen::Vector2d q1 = pert_dom.polyline[i - 1]; // larger x
    if (q0.x() >= x_top) break;
    seg_a.push_back(q0);
    seg_b.push_back(q1);
  }

  auto seg_dist = [](const Eigen::Vector2d& pnt, const Eigen::Vector2d& a,
                     const Eigen::Vector2d& b) {
    const Eigen::Vector2d ab = b - a;
    const double t = std::clamp(ab.dot(pnt - a) / ab.squaredNorm(), 0.0, 1.0);
    return (pnt - (a + t * ab)).norm();
  };

  wit.phi_values.resize(pert_mesh.num_nodes());
  for (int i = 0; i < pert_mesh.num_nodes(); ++i) {
    const Eigen::Vector2d& q = pert_mesh.nodes[i];
    double d = std::min(q.y(), q.x()); // bottom edge, left wall
    const double reach = 2.0 * delta + 0.05;
    if (q.x() < x_top + reach && d > 0.0) {
      for (std::size_t s = 0; s < seg_a.size(); ++s) {
        if (seg_a[s].x() > q.x() + d) break; // segments sorted by x
        if (seg_b[s].x() < q.x() - d) continue;
        d = std::min(d, seg_dist(q, seg_a[s], seg_b[s]));
        if (d == 0.0) break;
      }
    }
    wit.phi_values[i] = std::clamp(d / delta - 1.0, 0.0, 1.0);
  }
  return wit;
}

SubcriticalBoundResult subcritical_bound(const TriMesh& pert_mesh,
                                         const SubcriticalWitness& witness, double p,
                                         double mean_grad) {
  if (witness.phi_values.size() != pert_mesh.num_nodes())
    throw WitnessError("witness does not match the mesh");
  if (!(mean_grad > 0.0)) throw WitnessError("witness bound needs a non-constant profile");
  SubcriticalBoundResult res;
  const double num = assemble_energy(pert_mesh, p, witness.phi_values);
  const double den =
      boundary_lp_power(pert_mesh, p, witness.phi_values, surface_weights(pert_mesh));
  if (!(den > 0.0)) throw WitnessError("witness has no boundary mass");
  res.bound = num / den;
  res.c_hat = 2.0 * (witness.c_delta + 1.0) * witness.area / (mean_grad / 2.0);
  return res;
}

double compare_pullback(const SweepConfig& config, int k) {
  const double eps = 1.0 / k;
  const double h = config.h_of(eps);
  const OscillationSpec osc = config.osc();
  const SolverConfig solver = config.solver();

  const auto base_dom = build_base_domain(DomainKind::SquareTopChart, config.phi, h);
  const auto pert_dom = build_perturbed_boundary(base_dom, osc, eps);
  const auto pert_mesh = generate_mesh(pert_dom, h);
  const auto direct = optimize_window(pert_mesh, config.alpha, config.p,
                                      surface_weights(pert_mesh), solver, config.restarts);

  // The pulled-back functional carries eps-period coefficients through the
  // cutoff layer, so it is discretized on the transported mesh (a boundary-
  // layer-fitted triangulation of Omega at the same resolution scale). The
  // mu_eps edge weights are the preimage lengths, exactly.
  PerturbationMap map(config.phi, osc, eps);
  const auto base_mesh = map_mesh_through(pert_mesh, map);
  Eigen::VectorXd mu_w(base_mesh.boundary_edges.size());
  for (std::size_t e = 0; e < base_mesh.boundary_edges.size(); ++e)
    mu_w[e] = pert_mesh.boundary_edges[e].length;
  const auto coef = pullback_p2_coefficients(map);
  const auto pulled = optimize_window(base_mesh, config.alpha, config.p, mu_w, solver,
                                      config.restarts, &coef);

  return std::abs(direct.eig.lambda - pulled.eig.lambda) / direct.eig.lambda;
}

void emit_report(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open report output file: " + path);
  out << "k,eps,lambda,ref_lambda,rel_gap,slope_running,delta_measure,weakstar_err\n";
  char buf[320];
  for (const auto& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", row.k,
                  row.eps, row.lambda, row.ref_lambda, row.rel_gap, row.slope_running,
                  row.delta_measure, row.weakstar_err);
    out << buf;
  }
  if (!out) throw Error("failed writing report csv: " + path);

  std::ofstream side(path + ".json");
  if (!side) throw Error("cannot open report sidecar: " + path + ".json");
  std::ostringstream ks;
  for (std::size_t i = 0; i < result.config.ks.size(); ++i)
    ks << (i ? ", " : "") << result.config.ks[i];
  std::snprintf(buf, sizeof(buf),
                "{\n  \"a\": %.12g,\n  \"alpha\": %.12g,\n  \"p\": %.12g,\n"
                "  \"k_list\": [%s],\n  \"h_floor\": %.12g,\n  \"seed\": %u,\n"
                "  \"profile\": \"%s\"\n}\n",
                result.config.a, result.config.alpha, result.config.p, ks.str().c_str(),
                result.config.h_floor, result.config.seed,
                result.config.profile == ProfileKind::SinSquared ? "sin2" : "fourier");
  side << buf;
  if (!side) throw Error("failed writing report sidecar");
}

SweepResult read_report(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error("cannot open report csv: " + csv_path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "k,eps,lambda,ref_lambda,rel_gap,slope_running,delta_measure,weakstar_err")
    throw Error("unrecognized report header in " + csv_path);
  SweepResult result;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SweepRow row;
    std::vector<std::string> cells;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw Error("malformed report row in " + csv_path);
    try {
      row.k = std::stoi(cells[0]);
      row.eps = std::stod(cells[1]);
      row.lambda = std::stod(cells[2]);
      row.ref_lambda = std::stod(cells[3]);
      row.rel_gap = std::stod(cells[4]);
      row.slope_running = std::stod(cells[5]); // stod parses "nan"
      row.delta_measure = std::stod(cells[6]);
      row.weakstar_err = std::stod(cells[7]);
    } catch (const std::exception&) {
      throw Error("malformed report row in " + csv_path);
    }
    result.rows.push_back(row);
    result.config.ks.push_back(row.k);
  }
  return result;
}

} // namespace steklov
