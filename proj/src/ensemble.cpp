#include "defectline/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "defectline/errors.hpp"
#include "defectline/rng.hpp"

namespace defectline {

namespace {

struct TrialOutcome {
  std::vector<double> lifetimes;  // unclipped t_max values
  int clipped = 0;
};

TrialOutcome run_trial(const SweepConfig& cfg, double sigma, std::uint64_t sigma_idx,
                       std::uint64_t trial_idx) {
  const std::uint64_t seed = Xoshiro256pp::mix(cfg.base_seed, sigma_idx, trial_idx);
  const ComplexMatrix m0 = sample_ginibre(2, sigma, seed);
  double t0, t1;
  if (cfg.t_range) {
    t0 = cfg.t_range->first;
    t1 = cfg.t_range->second;
  } else {
    const double tmax = 4.0 * sigma + 4.0;
    t0 = -tmax;
    t1 = tmax;
  }
  TrialOutcome out;
  for (const auto& rec : measure_lifetime(m0, cfg.s, t0, t1, cfg.dt)) {
    if (rec.clipped)
      ++out.clipped;
    else
      out.lifetimes.push_back(rec.t_max);
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  if (config.sigmas.empty()) throw std::invalid_argument("run_sweep: sigmas must be nonempty");
  if (!std::is_sorted(config.sigmas.begin(), config.sigmas.end()))
    throw std::invalid_argument("run_sweep: sigmas must be sorted");
  for (double s : config.sigmas)
    if (!(s > 0)) throw std::invalid_argument("run_sweep: sigmas must be positive");
  if (config.trials_per_sigma < 1)
    throw std::invalid_argument("run_sweep: trials_per_sigma must be >= 1");

  SweepResult result;
  unsigned nthreads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());

  for (std::size_t si = 0; si < config.sigmas.size(); ++si) {
    const double sigma = config.sigmas[si];
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials_per_sigma));

    // Deterministic trial seeds; any parallel schedule aggregates identically
    // because outcomes land in their trial slot before reduction.
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= config.trials_per_sigma) return;
        outcomes[static_cast<std::size_t>(i)] =
            run_trial(config, sigma, static_cast<std::uint64_t>(si), static_cast<std::uint64_t>(i));
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < nthreads; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    SigmaStat stat;
    stat.sigma = sigma;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < config.trials_per_sigma; ++i) {
      const auto& o = outcomes[static_cast<std::size_t>(i)];
      if (!o.lifetimes.empty()) ++stat.count_with_transient;
      stat.n_clipped += o.clipped;
      for (double v : o.lifetimes) {
        sum += v;
        sum2 += v * v;
        ++stat.n_records;
      }
    }
    if (stat.n_records > 0) {
      stat.mean_t_max = sum / stat.n_records;
      const double var =
          std::max(0.0, sum2 / stat.n_records - stat.mean_t_max * stat.mean_t_max);
      stat.std_error = std::sqrt(var / stat.n_records);
    }
    result.per_sigma.push_back(stat);
  }

  // OLS over the sigmas that produced data.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (const auto& st : result.per_sigma) {
    if (st.n_records == 0) continue;
    sx += st.sigma;
    sy += st.mean_t_max;
    sxx += st.sigma * st.sigma;
    sxy += st.sigma * st.mean_t_max;
    syy += st.mean_t_max * st.mean_t_max;
    ++n;
  }
  if (n == 0) throw EmptyFitError("run_sweep: no transients at any sigma");
  if (n == 1) {
    result.fit.intercept = 0;
    result.fit.slope = sy / sx;
    result.fit.r2 = 1.0;
    return result;
  }
  const double denom = n * sxx - sx * sx;
  result.fit.slope = (n * sxy - sx * sy) / denom;
  result.fit.intercept = (sy - result.fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (const auto& st : result.per_sigma) {
    if (st.n_records == 0) continue;
    const double pred = result.fit.intercept + result.fit.slope * st.sigma;
    ss_res += (st.mean_t_max - pred) * (st.mean_t_max - pred);
    ss_tot += (st.mean_t_max - ybar) * (st.mean_t_max - ybar);
  }
  result.fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return result;
}

double uncertainty_check(const SweepResult& result) {
  double acc = 0;
  int n = 0;
  for (const auto& st : result.per_sigma) {
    if (st.n_records == 0) continue;
    acc += st.mean_t_max / (1.6 * st.sigma);
    ++n;
  }
  return n > 0 ? acc / n : 0.0;
}

}  // namespace defectline
