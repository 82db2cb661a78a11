#include "steklov/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "steklov/measures.hpp"
#include "steklov/transforms.hpp"
#include "steklov/windows.hpp"

namespace steklov {

double RunConfig::regime_exponent() const {
  if (a.has_value()) return *a;
  if (regime == "subcritical") return 0.5;
  if (regime == "critical") return 1.0;
  if (regime == "supercritical") return 2.0;
  throw ConfigError("regime");
}

OscillationSpec RunConfig::osc() const {
  if (profile == "sin2") return OscillationSpec::sin_squared(regime_exponent());
  if (profile == "fourier")
    return OscillationSpec::fourier(regime_exponent(), fourier_cos, fourier_sin);
  throw ConfigError("profile");
}

ChartFn RunConfig::phi() const {
  ChartFn fn;
  fn.c0 = phi_height;
  fn.c1 = phi_slope;
  fn.c2 = phi_wave;
  return fn;
}

SweepConfig RunConfig::sweep() const {
  SweepConfig sc;
  sc.a = regime_exponent();
  sc.alpha = alpha;
  sc.p = p;
  sc.ks = ks;
  sc.h_floor = h_floor;
  sc.seed = seed;
  sc.restarts = restarts;
  sc.profile = (profile == "sin2") ? ProfileKind::SinSquared : ProfileKind::Fourier;
  sc.fourier_cos = fourier_cos;
  sc.fourier_sin = fourier_sin;
  sc.phi = phi();
  sc.output = out;
  return sc;
}

void validate_config(const RunConfig& config) {
  if (config.regime != "subcritical" && config.regime != "critical" &&
      config.regime != "supercritical")
    throw ConfigError("regime");
  if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) throw ConfigError("alpha");
  if (config.a.has_value() && !(*config.a > 0.0)) throw ConfigError("a");
  if (!(config.p >= 2.0)) throw ConfigError("p");
  if (config.ks.empty()) throw ConfigError("k");
  for (std::size_t i = 0; i < config.ks.size(); ++i) {
    if (config.ks[i] < 2) throw ConfigError("k");
    if (i > 0 && config.ks[i] <= config.ks[i - 1]) throw ConfigError("k");
  }
  if (!(config.h_floor > 0.0)) throw ConfigError("h_floor");
  if (config.profile != "sin2" && config.profile != "fourier") throw ConfigError("profile");
  if (config.domain != "square" && config.domain != "disk") throw ConfigError("domain");
  if (!(config.h > 0.0)) throw ConfigError("h");
  if (config.grid < 2) throw ConfigError("grid");
  if (config.restarts < 0) throw ConfigError("restarts");
  checked_cell_count(config.eps); // eps must be 1/k
}

namespace {

RunConfig parse_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "regime",      "a",        "alpha",       "p",         "k",          "h_floor",
      "seed",        "restarts", "profile",     "fourier_cos", "fourier_sin", "domain",
      "phi_height",  "phi_slope", "phi_wave",   "eps",       "perturbed",  "weighted",
      "h",           "grid",     "out",         "verbosity"};
  RunConfig config;
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key: " + key);
    try {
      if (key == "regime") config.regime = value.get<std::string>();
      else if (key == "a") config.a = value.get<double>();
      else if (key == "alpha") config.alpha = value.get<double>();
      else if (key == "p") config.p = value.get<double>();
      else if (key == "k") {
        if (value.is_array()) config.ks = value.get<std::vector<int>>();
        else config.ks = {value.get<int>()};
      } else if (key == "h_floor") config.h_floor = value.get<double>();
      else if (key == "seed") config.seed = value.get<unsigned>();
      else if (key == "restarts") config.restarts = value.get<int>();
      else if (key == "profile") config.profile = value.get<std::string>();
      else if (key == "fourier_cos") config.fourier_cos = value.get<std::vector<double>>();
      else if (key == "fourier_sin") config.fourier_sin = value.get<std::vector<double>>();
      else if (key == "domain") config.domain = value.get<std::string>();
      else if (key == "phi_height") config.phi_height = value.get<double>();
      else if (key == "phi_slope") config.phi_slope = value.get<double>();
      else if (key == "phi_wave") config.phi_wave = value.get<double>();
      else if (key == "eps") config.eps = value.get<double>();
      else if (key == "perturbed") config.perturbed = value.get<bool>();
      else if (key == "weighted") config.weighted = value.get<bool>();
      else if (key == "h") config.h = value.get<double>();
      else if (key == "grid") config.grid = value.get<int>();
      else if (key == "out") config.out = value.get<std::string>();
      else if (key == "verbosity") config.verbosity = value.get<int>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(key);
    }
  }
  validate_config(config);
  return config;
}

} // namespace

RunConfig parse_config_text(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_json(j);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

namespace {

Eigen::VectorXd surface_weights(const TriMesh& mesh) {
  Eigen::VectorXd w(mesh.boundary_edges.size());
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i)
    w[i] = mesh.boundary_edges[i].length;
  return w;
}

TriMesh build_run_mesh(const RunConfig& config, ChartedDomain* dom_out = nullptr) {
  const DomainKind kind =
      config.domain == "disk" ? DomainKind::UnitDisk : DomainKind::SquareTopChart;
  double h = config.h;
  ChartedDomain dom = build_base_domain(kind, config.phi(), h);
  if (config.perturbed) {
    if (kind == DomainKind::UnitDisk) throw ConfigError("perturbed");
    dom = build_perturbed_boundary(dom, config.osc(), config.eps);
    h = std::min(h, config.eps / 8.0);
  }
  if (dom_out) *dom_out = dom;
  return generate_mesh(dom, h);
}

int run_weight(const RunConfig& config) {
  const auto osc = config.osc();
  const ChartFn phi = config.phi();
  std::printf("x,m\n");
  for (int i = 0; i < config.grid; ++i) {
    const double x = static_cast<double>(i) / (config.grid - 1);
    std::printf("%.12g,%.12g\n", x, homogenized_weight(phi.deriv(x), osc));
  }
  return 0;
}

int run_solve(const RunConfig& config) {
  const TriMesh mesh = build_run_mesh(config);
  SolverConfig solver;
  solver.seed = config.seed;
  const auto w = surface_weights(mesh);
  TraceEigenpair eig;
  if (config.p == 2.0) {
    eig = solve_p2(mesh, w, {}, solver);
  } else {
    eig = solve_p_general(mesh, w, {}, config.p, solver);
  }
  std::printf("{ \"lambda\": %.12g, \"iterations\": %d, \"residual\": %.12g, \"nodes\": %d }\n",
              eig.lambda, eig.iterations, eig.residual, mesh.num_nodes());
  if (!config.out.empty()) {
    write_eigenpair_csv(mesh, eig, config.out);
    write_eigenpair_summary_json(eig, config.p, 0.0, config.out + ".json");
  }
  return 0;
}

int run_optimize(const RunConfig& config) {
  ChartedDomain dom;
  const TriMesh mesh = build_run_mesh(config, &dom);
  SolverConfig solver;
  solver.seed = config.seed;
  WindowOptimum opt;
  if (config.weighted) {
    const auto field = build_weight_field(mesh, config.phi(), config.osc());
    opt = solve_limit_problem(mesh, field, config.alpha, config.p, solver, config.restarts);
  } else {
    opt = optimize_window(mesh, config.alpha, config.p, surface_weights(mesh), solver,
                          config.restarts);
  }
  std::printf(
      "{ \"alpha\": %.12g, \"lambda\": %.12g, \"iterations\": %zu, \"restarts\": %d }\n",
      config.alpha, opt.eig.lambda, opt.trace.steps.size(), opt.trace.restarts);
  if (!config.out.empty()) {
    write_window_csv(mesh, opt.window, config.out);
    write_window_summary_json(opt, config.alpha, config.out + ".json");
  }
  return 0;
}

int run_sweep_cmd(const RunConfig& config) {
  SweepConfig sc = config.sweep();
  if (sc.output.empty()) sc.output = "sweep.csv";
  const auto result = run_sweep(sc);
  int failures = 0;
  for (const auto& row : result.rows) {
    if (row.failed) {
      ++failures;
      std::fprintf(stderr, "row k=%d failed: %s\n", row.k, row.error.c_str());
    } else if (config.verbosity > 0) {
      std::fprintf(stderr, "k=%d lambda=%.8g gap=%.3g\n", row.k, row.lambda, row.rel_gap);
    }
  }
  std::printf("{ \"rows\": %zu, \"failed\": %d, \"ref_lambda\": %.12g, \"slope\": %.12g, "
              "\"output\": \"%s\" }\n",
              result.rows.size(), failures, result.ref_lambda, result.slope,
              sc.output.c_str());
  return failures == 0 ? 0 : 1;
}

int run_check_transform(const RunConfig& config) {
  int failures = 0;
  auto report = [&](const char* name, bool ok, double value) {
    std::printf("[check-transform] %-34s %s (%.3g)\n", name, ok ? "PASS" : "FAIL", value);
    if (!ok) ++failures;
  };
  const ChartFn phi = config.phi();

  { // uniform convergence of the differential, a = 2
    double prev = 1e300;
    bool mono = true;
    double last = 0.0;
    for (const int k : {4, 8, 16, 32}) {
      PerturbationMap map(phi, OscillationSpec::sin_squared(2.0), 1.0 / k);
      double worst = 0.0;
      for (int i = 0; i <= 40; ++i)
        for (int j = 0; j <= 40; ++j) {
          const Eigen::Vector2d x(i / 40.0, 0.6 + 0.4 * j / 40.0);
          const auto b = jacobian_at(map, x);
          worst = std::max(worst, (b.DT - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
        }
      mono = mono && (worst <= prev + 1e-14);
      prev = worst;
      last = worst;
    }
    report("DT -> I monotone (a = 2)", mono && last < 0.1, last);
  }
  { // identity away from the boundary layer, a = 1
    PerturbationMap map(phi, OscillationSpec::sin_squared(1.0), config.eps);
    const double depth = std::sqrt(config.eps) * 1.01;
    bool exact = true;
    for (int i = 0; i <= 20 && exact; ++i)
      for (int j = 0; j <= 20; ++j) {
        const Eigen::Vector2d x(i / 20.0, (phi(i / 20.0) - depth) * j / 20.0);
        if (apply_T_eps(map, x) != x) {
          exact = false;
          break;
        }
      }
    report("T = id on deep compacts (a = 1)", exact, 0.0);
  }
  { // tangential Jacobian identity at chart points
    PerturbationMap map(phi, OscillationSpec::sin_squared(1.0), config.eps);
    double worst = 0.0;
    for (int i = 1; i < 40; ++i) {
      const double x = i / 40.0;
      const double top = phi(x) + map.amplitude() * map.osc.f(x / map.eps);
      const auto b = jacobian_at(map, {x, top});
      if (!b.Jtau) continue;
      const double slope = phi.deriv(x) + map.slope_scale() * map.osc.fprime(x / map.eps);
      Eigen::Vector2d t(1.0, slope);
      t.normalize();
      const Eigen::Vector2d n(t.y(), -t.x());
      const double via_normal = (b.DT.inverse().transpose() * n).norm() * b.J;
      worst = std::max(worst, std::abs(*b.Jtau - via_normal));
    }
    report("Jtau = |DT^-T n| J", worst <= 1e-12, worst);
  }
  { // weak-* exactness for constant g on integer cells
    auto rows = weakstar_test([](double) { return 1.0; }, {4, 8, 16},
                              OscillationSpec::sin_squared(1.0), phi);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.error);
    report("weak-* exact for g = 1", worst <= 1e-10 || phi.c2 != 0.0, worst);
  }
  { // homogenized weight bounds
    bool ok = true;
    double worst = 1.0;
    for (int i = 0; i <= 8; ++i) {
      const double m = homogenized_weight(-2.0 + 0.5 * i, OscillationSpec::sin_squared(1.0));
      ok = ok && m >= 1.0 - 1e-12;
      worst = std::min(worst, m);
    }
    ok = ok && homogenized_weight(0.7, OscillationSpec::zero()) == 1.0;
    report("m >= 1 and m = 1 for flat profiles", ok, worst);
  }
  return failures == 0 ? 0 : 1;
}

int run_report(const RunConfig& config) {
  if (config.report_from.empty()) throw ConfigError("report requires --from");
  const auto result = read_report(config.report_from);
  const std::string out = config.out.empty() ? "report.csv" : config.out;
  emit_report(result, out);
  std::printf("{ \"rows\": %zu, \"output\": \"%s\" }\n", result.rows.size(), out.c_str());
  return 0;
}

} // namespace

int dispatch(const std::string& subcommand, const RunConfig& config) {
  try {
    validate_config(config);
    if (subcommand == "weight") return run_weight(config);
    if (subcommand == "solve") return run_solve(config);
    if (subcommand == "optimize") return run_optimize(config);
    if (subcommand == "sweep") return run_sweep_cmd(config);
    if (subcommand == "check-transform") return run_check_transform(config);
    if (subcommand == "report") return run_report(config);
    std::fprintf(stderr, "unknown subcommand: %s\n", subcommand.c_str());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

} // namespace steklov
