#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "defectline/io.hpp"

using namespace defectline;

namespace {

RunConfig load_base_config(const std::string& config_path) {
  if (config_path.empty()) return RunConfig{};
  std::ifstream f(config_path);
  if (!f) throw std::runtime_error("cannot open config file " + config_path);
  std::stringstream ss;
  ss << f.rdbuf();
  return RunConfig::from_json(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"defectline: determinantal wave-function defect dynamics"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration (flags override)");

  RunConfig cfg;
  std::vector<double> window_flat;
  double s_re = 1.0, s_im = 0.0;
  bool s_re_set = false, s_im_set = false;

  auto* sim = app.add_subcommand("simulate", "phase grids and defect lists at time snapshots");
  auto* trk = app.add_subcommand("track", "defect-line tracking with event detection");
  auto* lif = app.add_subcommand("lifetimes", "sigma sweep of quaternionic transient lifetimes");
  auto* alg = app.add_subcommand("algebra", "defect group multiplets and reaction checks");

  std::vector<double> snapshots;
  int multiplet = 0;
  std::string reaction;

  for (CLI::App* cmd : {sim, trk, lif}) {
    cmd->add_option("--n", cfg.n, "matrix dimension N");
    cmd->add_option("--xi", cfg.xi, "number of lambda slots");
    cmd->add_option("--sigma", cfg.sigma, "Ginibre entry std dev (0: 1/sqrt(2N))");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
    cmd->add_option_function<double>("--s-re", [&](double v) { s_re = v; s_re_set = true; },
                                     "deformation parameter, real part");
    cmd->add_option_function<double>("--s-im", [&](double v) { s_im = v; s_im_set = true; },
                                     "deformation parameter, imaginary part");
    cmd->add_option("--builtin", cfg.builtin, "built-in field: bubble | appendix-c | appendix-d");
    cmd->add_option("--T", cfg.bubble_T, "bubble period T");
    cmd->add_option("--epsilon", cfg.epsilon, "builtin family parameter");
    cmd->add_option("--window", window_flat, "search window x0,x1,y0,y1")->expected(4);
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_flag("--strict", cfg.strict, "nonzero exit on suspect roots");
  }
  sim->add_option("--t", snapshots, "snapshot times");
  sim->add_option("--grid-res", cfg.grid_res, "phase grid resolution per axis");
  trk->add_option("--t0", cfg.t0, "start time");
  trk->add_option("--t1", cfg.t1, "end time");
  trk->add_option("--dt", cfg.dt, "time step");
  lif->add_option("--sigmas", cfg.sigmas, "sigma values for the sweep");
  lif->add_option("--trials", cfg.trials, "trials per sigma");
  lif->add_option("--dt", cfg.dt, "lifetime scan step");
  lif->add_flag("--paper-scale", cfg.paper_scale, "5000 trials per sigma");
  alg->add_option("--multiplet", multiplet, "print all defect complexes with P <= value");
  alg->add_option("--check", reaction, "validate a reaction, e.g. \"v+v* -> e+e\"");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig base = load_base_config(config_path);
    // Flags override the config file: fields left at their built-in default
    // take the file value.
    if (!config_path.empty()) {
      RunConfig merged = base;
      RunConfig defaults;
      auto pick = [](auto flag_val, auto def_val, auto file_val) {
        return flag_val != def_val ? flag_val : file_val;
      };
      merged.n = pick(cfg.n, defaults.n, base.n);
      merged.xi = pick(cfg.xi, defaults.xi, base.xi);
      merged.sigma = pick(cfg.sigma, defaults.sigma, base.sigma);
      merged.seed = pick(cfg.seed, defaults.seed, base.seed);
      merged.builtin = pick(cfg.builtin, defaults.builtin, base.builtin);
      merged.bubble_T = pick(cfg.bubble_T, defaults.bubble_T, base.bubble_T);
      merged.epsilon = pick(cfg.epsilon, defaults.epsilon, base.epsilon);
      merged.t0 = pick(cfg.t0, defaults.t0, base.t0);
      merged.t1 = pick(cfg.t1, defaults.t1, base.t1);
      merged.dt = pick(cfg.dt, defaults.dt, base.dt);
      merged.grid_res = pick(cfg.grid_res, defaults.grid_res, base.grid_res);
      merged.trials = pick(cfg.trials, defaults.trials, base.trials);
      merged.out_dir = pick(cfg.out_dir, defaults.out_dir, base.out_dir);
      if (cfg.paper_scale) merged.paper_scale = true;
      if (cfg.strict) merged.strict = true;
      if (!cfg.sigmas.empty()) merged.sigmas = cfg.sigmas;
      cfg = merged;
    }
    if (s_re_set || s_im_set) cfg.s = cplx(s_re_set ? s_re : cfg.s.real(),
                                           s_im_set ? s_im : cfg.s.imag());
    if (!window_flat.empty()) {
      cfg.window.x_min = window_flat[0];
      cfg.window.x_max = window_flat[1];
      cfg.window.y_min = window_flat[2];
      cfg.window.y_max = window_flat[3];
    }
    if (!snapshots.empty()) cfg.snapshots = snapshots;

    if (sim->parsed()) {
      cfg.mode = RunMode::Simulate;
      return run_simulate(cfg);
    }
    if (trk->parsed()) {
      cfg.mode = RunMode::Track;
      return run_track(cfg);
    }
    if (lif->parsed()) {
      cfg.mode = RunMode::Lifetimes;
      return run_lifetimes(cfg);
    }
    if (alg->parsed()) return run_algebra(multiplet, reaction);
  } catch (const std::exception& e) {
    std::cerr << "defectline: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
