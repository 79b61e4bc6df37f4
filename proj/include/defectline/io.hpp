#pragma once

#include <optional>
#include <string>
#include <vector>

#include "defectline/ensemble.hpp"
#include "defectline/tracker.hpp"

namespace defectline {

enum class RunMode { Simulate, Track, Lifetimes, Algebra };

/// Run configuration: a single JSON document; CLI flags override fields.
struct RunConfig {
  RunMode mode = RunMode::Simulate;

  // Field specification: either a built-in or an (n, xi, sigma|matrix, s)
  // determinantal field.
  std::string builtin;  // "", "bubble", "appendix-c", "appendix-d"
  int n = 10;
  int xi = 10;
  double sigma = 0;  // 0: standard 1/sqrt(2N)
  std::uint64_t seed = 1;
  cplx s{1.0, 0.0};
  std::optional<ComplexMatrix> matrix;  // explicit M0 overrides sampling
  double bubble_T = 1.0;
  double epsilon = 0.5;

  SearchWindow window{-2.5, 2.5, -2.5, 2.5, 32};
  double t0 = 0.0, t1 = 1.0, dt = 0.01;
  std::vector<double> snapshots{0.0};
  int grid_res = 201;

  // Lifetime sweep
  std::vector<double> sigmas;
  int trials = 1000;
  bool paper_scale = false;

  std::string out_dir = "out";
  bool strict = false;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
};

/// Build the configured field. The caller owns the result.
std::unique_ptr<FieldView> make_field(const RunConfig& cfg);

// CSV / JSON emitters. All CSV files carry a header row; JSON key order is
// stable.
void write_phase_grid_csv(const std::string& path, const FieldSlice& slice,
                          const SearchWindow& window, int res);
void write_defects_csv(const std::string& path, const std::vector<Defect>& defects);
void write_trajectories_csv(const std::string& path, const std::vector<DefectLine>& lines);
void write_events_json(const std::string& path, const std::vector<TopologicalEvent>& events);
void write_sweep_csv(const std::string& path, const SweepResult& result);
void write_fit_json(const std::string& path, const SweepResult& result, double uncertainty);

std::vector<Defect> read_defects_csv(const std::string& path);

/// Subcommand drivers; return process exit codes.
int run_simulate(const RunConfig& cfg);
int run_track(const RunConfig& cfg);
int run_lifetimes(const RunConfig& cfg);
int run_algebra(int multiplet_max, const std::string& reaction);

}  // namespace defectline
