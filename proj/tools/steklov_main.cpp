#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "steklov/config.hpp"

// Command line front end: a single binary with subcommands sharing one config
// schema. A --config JSON file supplies base values; explicit flags override.
int main(int argc, char** argv) {
  CLI::App app{"steklov: Sobolev trace constants on domains with oscillating boundaries"};
  app.require_subcommand(1);
  app.allow_extras(false);

  std::string config_path;
  steklov::RunConfig config;

  // flag -> field bindings, applied after the config file
  std::string regime, profile, domain, out, from;
  double a_val = 0.0, alpha = 0.0, p = 0.0, h_floor = 0.0, eps = 0.0, h = 0.0;
  double phi_height = 0.0, phi_slope = 0.0, phi_wave = 0.0;
  std::vector<int> ks;
  std::vector<double> fourier_cos, fourier_sin;
  unsigned seed = 0;
  int restarts = 0, grid = 0, verbosity = 0;
  bool perturbed = false, weighted = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
    cmd->add_option("--regime", regime,
                    "subcritical | critical | supercritical (default critical)");
    cmd->add_option("--a", a_val, "amplitude exponent, overrides the regime default");
    cmd->add_option("--alpha", alpha, "window measure fraction in (0,1) (default 0.3)");
    cmd->add_option("--p", p, "exponent p >= 2 (default 2)");
    cmd->add_option("--k", ks, "cell counts k (eps = 1/k); default 4 8 16 32");
    cmd->add_option("--h-floor", h_floor, "mesh size floor for sweeps (default 1/512)");
    cmd->add_option("--seed", seed, "rng seed (default 1234)");
    cmd->add_option("--restarts", restarts, "optimizer restarts (default 3)");
    cmd->add_option("--profile", profile, "sin2 | fourier (default sin2)");
    cmd->add_option("--fourier-cos", fourier_cos, "fourier cosine coefficients");
    cmd->add_option("--fourier-sin", fourier_sin, "fourier sine coefficients");
    cmd->add_option("--domain", domain, "square | disk (default square)");
    cmd->add_option("--phi-height", phi_height, "chart height c0 (default 1)");
    cmd->add_option("--phi-slope", phi_slope, "chart slope c1 (default 0)");
    cmd->add_option("--phi-wave", phi_wave, "chart sin(pi x) amplitude c2 (default 0)");
    cmd->add_option("--eps", eps, "period 1/k for single-domain runs (default 1/8)");
    cmd->add_flag("--perturbed", perturbed, "solve on the perturbed domain");
    cmd->add_flag("--weighted", weighted, "optimize against d mu* = m dS");
    cmd->add_option("--mesh", h, "mesh size for single-domain runs (default 0.05)");
    cmd->add_option("--grid", grid, "x' sample count for weight (default 17)");
    cmd->add_option("--out", out, "output file path");
    cmd->add_option("--from", from, "input CSV for report");
    cmd->add_option("--verbosity", verbosity, "0 quiet, 1 per-row progress");
    return cmd;
  };

  std::vector<CLI::App*> subs;
  subs.push_back(add_common(app.add_subcommand("weight", "print the homogenized weight m on an x' grid")));
  subs.push_back(add_common(app.add_subcommand("solve", "single trace eigenpair, no window")));
  subs.push_back(add_common(app.add_subcommand("optimize", "optimal window for lambda(alpha)")));
  subs.push_back(add_common(app.add_subcommand("sweep", "eps-sweep over a regime with diagnostics")));
  subs.push_back(add_common(app.add_subcommand("check-transform", "run the transform invariant suite")));
  subs.push_back(add_common(app.add_subcommand("report", "re-emit a sweep CSV (--from in.csv)")));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    if (cmd->count("--config")) config = steklov::parse_config_file(config_path);

    // flags override the file
    if (cmd->count("--regime")) config.regime = regime;
    if (cmd->count("--a")) config.a = a_val;
    if (cmd->count("--alpha")) config.alpha = alpha;
    if (cmd->count("--p")) config.p = p;
    if (cmd->count("--k")) config.ks = ks;
    if (cmd->count("--h-floor")) config.h_floor = h_floor;
    if (cmd->count("--seed")) config.seed = seed;
    if (cmd->count("--restarts")) config.restarts = restarts;
    if (cmd->count("--profile")) config.profile = profile;
    if (cmd->count("--fourier-cos")) config.fourier_cos = fourier_cos;
    if (cmd->count("--fourier-sin")) config.fourier_sin = fourier_sin;
    if (cmd->count("--domain")) config.domain = domain;
    if (cmd->count("--phi-height")) config.phi_height = phi_height;
    if (cmd->count("--phi-slope")) config.phi_slope = phi_slope;
    if (cmd->count("--phi-wave")) config.phi_wave = phi_wave;
    if (cmd->count("--eps")) config.eps = eps;
    if (cmd->count("--perturbed")) config.perturbed = perturbed;
    if (cmd->count("--weighted")) config.weighted = weighted;
    if (cmd->count("--mesh")) config.h = h;
    if (cmd->count("--grid")) config.grid = grid;
    if (cmd->count("--out")) config.out = out;
    if (cmd->count("--from")) config.report_from = from;
    if (cmd->count("--verbosity")) config.verbosity = verbosity;
  } catch (const steklov::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  return steklov::dispatch(cmd->get_name(), config);
}
