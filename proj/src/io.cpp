#include "defectline/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "defectline/errors.hpp"
#include "json.hpp"

namespace defectline {

namespace {

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::Simulate: return "simulate";
    case RunMode::Track: return "track";
    case RunMode::Lifetimes: return "lifetimes";
    case RunMode::Algebra: return "algebra";
  }
  return "simulate";
}

RunMode mode_from(const std::string& s) {
  if (s == "simulate") return RunMode::Simulate;
  if (s == "track") return RunMode::Track;
  if (s == "lifetimes") return RunMode::Lifetimes;
  if (s == "algebra") return RunMode::Algebra;
  throw std::invalid_argument("RunConfig: unknown mode '" + s + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = mode_name(mode);
  j["builtin"] = builtin;
  j["n"] = n;
  j["xi"] = xi;
  j["sigma"] = sigma;
  j["seed"] = seed;
  j["s_re"] = s.real();
  j["s_im"] = s.imag();
  if (matrix) j["matrix"] = nlohmann::ordered_json::parse(matrix_to_json(*matrix));
  j["bubble_T"] = bubble_T;
  j["epsilon"] = epsilon;
  j["window"] = {window.x_min, window.x_max, window.y_min, window.y_max};
  j["grid_density"] = window.grid_density;
  j["t0"] = t0;
  j["t1"] = t1;
  j["dt"] = dt;
  j["snapshots"] = snapshots;
  j["grid_res"] = grid_res;
  j["sigmas"] = sigmas;
  j["trials"] = trials;
  j["paper_scale"] = paper_scale;
  j["out"] = out_dir;
  j["strict"] = strict;
  return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunConfig c;
  if (j.contains("mode")) c.mode = mode_from(j["mode"].get<std::string>());
  if (j.contains("builtin")) c.builtin = j["builtin"].get<std::string>();
  if (j.contains("n")) c.n = j["n"].get<int>();
  if (j.contains("xi")) c.xi = j["xi"].get<int>();
  if (j.contains("sigma")) c.sigma = j["sigma"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("s_re")) c.s = cplx(j["s_re"].get<double>(), c.s.imag());
  if (j.contains("s_im")) c.s = cplx(c.s.real(), j["s_im"].get<double>());
  if (j.contains("matrix")) c.matrix = matrix_from_json(j["matrix"].dump());
  if (j.contains("bubble_T")) c.bubble_T = j["bubble_T"].get<double>();
  if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
  if (j.contains("window")) {
    const auto w = j["window"].get<std::vector<double>>();
    if (w.size() != 4) throw std::invalid_argument("RunConfig: window must be [x0,x1,y0,y1]");
    c.window.x_min = w[0];
    c.window.x_max = w[1];
    c.window.y_min = w[2];
    c.window.y_max = w[3];
  }
  if (j.contains("grid_density")) c.window.grid_density = j["grid_density"].get<int>();
  if (j.contains("t0")) c.t0 = j["t0"].get<double>();
  if (j.contains("t1")) c.t1 = j["t1"].get<double>();
  if (j.contains("dt")) c.dt = j["dt"].get<double>();
  if (j.contains("snapshots")) c.snapshots = j["snapshots"].get<std::vector<double>>();
  if (j.contains("grid_res")) c.grid_res = j["grid_res"].get<int>();
  if (j.contains("sigmas")) c.sigmas = j["sigmas"].get<std::vector<double>>();
  if (j.contains("trials")) c.trials = j["trials"].get<int>();
  if (j.contains("paper_scale")) c.paper_scale = j["paper_scale"].get<bool>();
  if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
  if (j.contains("strict")) c.strict = j["strict"].get<bool>();
  return c;
}

std::unique_ptr<FieldView> make_field(const RunConfig& cfg) {
  if (cfg.builtin == "bubble") return std::make_unique<BubbleField>(cfg.bubble_T);
  if (cfg.builtin == "appendix-c") return std::make_unique<PhaseSurfaceField>(cfg.epsilon);
  if (cfg.builtin == "appendix-d") return std::make_unique<LineEllipseField>(cfg.epsilon);
  if (!cfg.builtin.empty())
    throw std::invalid_argument("make_field: unknown builtin '" + cfg.builtin + "'");
  EvolutionLaw law;
  if (cfg.matrix) {
    law.m0 = *cfg.matrix;
  } else {
    law.m0 = cfg.sigma > 0 ? sample_ginibre(cfg.n, cfg.sigma, cfg.seed)
                           : ginibre_standard(cfg.n, cfg.seed);
  }
  law.s = cfg.s;
  return std::make_unique<WaveField>(std::move(law), cfg.xi);
}

void write_phase_grid_csv(const std::string& path, const FieldSlice& slice,
                          const SearchWindow& window, int res) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "x,y,phi\n";
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      const double x = window.x_min + (window.x_max - window.x_min) * i / (res - 1);
      const double y = window.y_min + (window.y_max - window.y_min) * j / (res - 1);
      f << fmt(x) << ',' << fmt(y) << ',' << fmt(phase_of(slice.psi(x, y))) << '\n';
    }
}

void write_defects_csv(const std::string& path, const std::vector<Defect>& defects) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "t,x,y,m,n,species\n";
  for (const auto& d : defects)
    f << fmt(d.t) << ',' << fmt(d.x) << ',' << fmt(d.y) << ',' << d.m << ',' << d.n_index << ','
      << species_name(d.species) << '\n';
}

std::vector<Defect> read_defects_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(f, line);  // header
  std::vector<Defect> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    Defect d;
    std::getline(ss, tok, ',');
    d.t = std::stod(tok);
    std::getline(ss, tok, ',');
    d.x = std::stod(tok);
    std::getline(ss, tok, ',');
    d.y = std::stod(tok);
    std::getline(ss, tok, ',');
    d.m = std::stoi(tok);
    std::getline(ss, tok, ',');
    d.n_index = std::stoi(tok);
    std::getline(ss, tok, ',');
    d.species = species_from_name(tok);
    out.push_back(d);
  }
  return out;
}

void write_trajectories_csv(const std::string& path, const std::vector<DefectLine>& lines) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "line_id,t,x,y,species,m,n\n";
  for (const auto& l : lines)
    for (const auto& d : l.samples)
      f << l.id << ',' << fmt(d.t) << ',' << fmt(d.x) << ',' << fmt(d.y) << ','
        << species_name(d.species) << ',' << d.m << ',' << d.n_index << '\n';
}

void write_events_json(const std::string& path, const std::vector<TopologicalEvent>& events) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    j["t"] = e.t;
    j["x"] = e.x;
    j["y"] = e.y;
    std::vector<std::string> in, out;
    for (auto s : e.incoming) in.push_back(species_name(s));
    for (auto s : e.outgoing) out.push_back(species_name(s));
    j["incoming"] = in;
    j["outgoing"] = out;
    j["legal"] = e.legal;
    j["at_boundary"] = e.at_boundary;
    arr.push_back(j);
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << arr.dump(2) << '\n';
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "sigma,mean_t_max,n_transients,stderr\n";
  for (const auto& st : result.per_sigma)
    f << fmt(st.sigma) << ',' << fmt(st.mean_t_max) << ',' << st.n_records << ','
      << fmt(st.std_error) << '\n';
}

void write_fit_json(const std::string& path, const SweepResult& result, double uncertainty) {
  nlohmann::ordered_json j;
  j["intercept"] = result.fit.intercept;
  j["slope"] = result.fit.slope;
  j["r2"] = result.fit.r2;
  j["uncertainty_check"] = uncertainty;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << j.dump(2) << '\n';
}

namespace {

std::vector<Defect> snapshot_defects(const FieldView& field, double t, const RunConfig& cfg) {
  if (field.has_analytic_defects()) {
    auto d = field.analytic_defects(t);
    std::vector<Defect> in_window;
    for (auto& x : d)
      if (cfg.window.contains(x.x, x.y)) in_window.push_back(x);
    return in_window;
  }
  const auto slice = field.slice(t);
  const auto zeros = find_plane_zeros(*slice, cfg.window);
  const auto cls = classify_all(*slice, zeros.roots, {});
  return cls.defects;
}

}  // namespace

int run_simulate(const RunConfig& cfg) {
  try {
    std::filesystem::create_directories(cfg.out_dir);
    const auto field = make_field(cfg);
    for (double t : cfg.snapshots) {
      const auto slice = field->slice(t);
      std::ostringstream tag;
      tag << "t" << t;
      write_phase_grid_csv(cfg.out_dir + "/phase_" + tag.str() + ".csv", *slice, cfg.window,
                           cfg.grid_res);
      const auto defects = snapshot_defects(*field, t, cfg);
      write_defects_csv(cfg.out_dir + "/defects_" + tag.str() + ".csv", defects);
      const auto [w, chi] = totals(defects);
      std::cout << "t=" << t << ": " << defects.size() << " defects, w=" << w << ", chi=" << chi
                << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return 1;
  }
}

int run_track(const RunConfig& cfg) {
  try {
    std::filesystem::create_directories(cfg.out_dir);
    const auto field = make_field(cfg);
    TrackOptions topts;
    const TrackResult result = track(*field, cfg.t0, cfg.t1, cfg.dt, cfg.window, topts);
    write_trajectories_csv(cfg.out_dir + "/trajectories.csv", result.lines);
    write_events_json(cfg.out_dir + "/events.json", result.events);

    std::cout << "tracked " << result.lines.size() << " defect lines, " << result.events.size()
              << " events";
    if (result.nodal_only) std::cout << " (nodal lines only)";
    std::cout << "\n";
    // Per-step totals, compressed to the steps where they change.
    for (std::size_t i = 0; i < result.totals.size(); ++i) {
      const auto& tot = result.totals[i];
      if (i == 0 || i + 1 == result.totals.size() || tot.w != result.totals[i - 1].w ||
          tot.chi != result.totals[i - 1].chi)
        std::cout << "  t=" << tot.t << " w=" << tot.w << " chi=" << tot.chi << "\n";
    }
    for (const auto& e : result.events)
      std::cout << "  event t=" << e.t << " at (" << e.x << "," << e.y << "): "
                << multiset_to_string(multiset_of_species(e.incoming)) << " -> "
                << multiset_to_string(multiset_of_species(e.outgoing))
                << (e.legal ? " (legal)" : " (ILLEGAL)") << "\n";
    std::cout << "violations: " << result.violations << "\n";
    if (result.min_approach < 1e300)
      std::cout << "closest nodal approach (non-event): " << result.min_approach << "\n";
    for (const auto& w : result.warnings) std::cout << "warning: " << w << "\n";
    if (result.violations > 0) return 1;
    if (cfg.strict && !result.suspects.empty()) return 1;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "track: " << e.what() << "\n";
    return 1;
  }
}

int run_lifetimes(const RunConfig& cfg) {
  try {
    std::filesystem::create_directories(cfg.out_dir);
    SweepConfig sc;
    sc.sigmas = cfg.sigmas;
    if (sc.sigmas.empty())
      for (int k = 1; k <= 10; ++k) sc.sigmas.push_back(2.0 * k);
    sc.trials_per_sigma = cfg.paper_scale ? 5000 : cfg.trials;
    sc.s = cfg.s;
    sc.dt = cfg.dt;
    sc.base_seed = cfg.seed;
    const SweepResult result = run_sweep(sc);
    const double unc = uncertainty_check(result);
    write_sweep_csv(cfg.out_dir + "/sweep.csv", result);
    write_fit_json(cfg.out_dir + "/fit.json", result, unc);
    std::cout << "fit: mean_t_max = " << result.fit.intercept << " + " << result.fit.slope
              << " sigma  (r2 = " << result.fit.r2 << ")\n";
    std::cout << "uncertainty check mean_t_max/(1.6 sigma) = " << unc << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "lifetimes: " << e.what() << "\n";
    return 1;
  }
}

int run_algebra(int multiplet_max, const std::string& reaction) {
  try {
    if (multiplet_max > 0) {
      for (int p = 1; p <= multiplet_max; ++p) {
        const auto complexes = enumerate_multiplet(p);
        std::cout << "P=" << p << " (" << complexes.size() << " complexes)\n";
        for (const auto& c : complexes)
          std::cout << "  [w=" << c.w << ", chi=" << c.chi << ", P=" << c.p << "]  "
                    << multiset_to_string(c.members) << "\n";
      }
    }
    if (!reaction.empty()) {
      const auto arrow = reaction.find("->");
      if (arrow == std::string::npos)
        throw std::invalid_argument("reaction must be of the form \"v+v* -> e+e\"");
      const GenMultiset in = parse_multiset(reaction.substr(0, arrow));
      const GenMultiset out = parse_multiset(reaction.substr(arrow + 2));
      const bool legal = vertex_legal(in, out);
      const auto vi = group_reduce(in);
      const auto vo = group_reduce(out);
      std::cout << multiset_to_string(in) << " -> " << multiset_to_string(out) << ": "
                << (legal ? "legal" : "illegal") << "  [(w,chi) " << vi.m << "," << vi.n_index
                << " -> " << vo.m << "," << vo.n_index << "]\n";
      return legal ? 0 : 2;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "algebra: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace defectline
