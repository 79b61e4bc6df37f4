#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "defectline/matrix.hpp"
#include "defectline/tracker.hpp"

namespace defectline {

/// Sigma-sweep of quaternionic-transient lifetimes for the 2x2 model.
struct SweepConfig {
  std::vector<double> sigmas;         // nonempty, sorted ascending
  int trials_per_sigma = 1000;
  cplx s{1.0, 0.0};
  /// Search range per trial; when unset, [-T, T] with T = 4 sigma + 4 so
  /// transients are not clipped.
  std::optional<std::pair<double, double>> t_range;
  double dt = 0.01;
  std::uint64_t base_seed = 20250101;
  int threads = 0;  // 0: hardware concurrency
};

struct SigmaStat {
  double sigma = 0;
  double mean_t_max = 0;
  int count_with_transient = 0;  // trials with at least one recorded transient
  int n_records = 0;             // transients entering the mean
  int n_clipped = 0;             // excluded: still open at a range boundary
  double std_error = 0;
};

struct FitLine {
  double intercept = 0, slope = 0, r2 = 0;
};

struct SweepResult {
  std::vector<SigmaStat> per_sigma;
  FitLine fit;
};

/// Runs the sweep: per sigma, trials_per_sigma 2x2 Ginibre matrices (seed
/// mixed from base_seed, sigma index and trial index), lifetimes measured
/// under M(t) = M0 + t diag(s, -s), averaged over recorded transients, then
/// an ordinary least-squares line through (sigma, mean). Bit-reproducible
/// from the config regardless of thread count.
SweepResult run_sweep(const SweepConfig& config);

/// Mean over sigma of mean_t_max(sigma) / (1.6 sigma).
double uncertainty_check(const SweepResult& result);

}  // namespace defectline
