#include "mudiv/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "mudiv/core_model.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/philox.hpp"

namespace mudiv {

using detail::require;

namespace {

// Welford accumulator with Chan's pairwise merge.
struct RunningStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }

  void merge(const RunningStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const auto na = static_cast<double>(n);
    const auto nb = static_cast<double>(o.n);
    const double total = na + nb;
    const double d = o.mean - mean;
    mean += d * nb / total;
    m2 += o.m2 + d * d * na * nb / total;
    n += o.n;
  }

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

struct PipelineStats {
  RunningStats rate;
  RunningStats err2;
  RunningStats hhat2;
  RunningStats max_hhat2;
  RunningStats cross;

  void merge(const PipelineStats& o) {
    rate.merge(o.rate);
    err2.merge(o.err2);
    hhat2.merge(o.hhat2);
    max_hhat2.merge(o.max_hhat2);
    cross.merge(o.cross);
  }
};

struct BlockModel {
  std::int64_t users;
  double alpha;
  double data_power;
  double sigma_z2;
  double h_scale;       // sqrt(sigma_h2 / 2)
  double z_scale;       // sqrt(sigma_z2 / 2)
  double pilot_amp;     // sqrt(T P_T)
  double estimator;     // sigma_h2 sqrt(T P_T) / (sigma_h2 T P_T + sigma_z2)
  double sigma_e2;

  explicit BlockModel(const PipelineParams& p)
      : users(p.users),
        alpha(p.alpha),
        data_power(p.data_power),
        sigma_z2(p.sigma_z2),
        h_scale(std::sqrt(p.sigma_h2 / 2.0)),
        z_scale(std::sqrt(p.sigma_z2 / 2.0)),
        pilot_amp(std::sqrt(static_cast<double>(p.pilot_length) * p.pilot_power)),
        estimator(p.sigma_h2 * pilot_amp /
                  (p.sigma_h2 * static_cast<double>(p.pilot_length) * p.pilot_power +
                   p.sigma_z2)),
        sigma_e2(mmse_error_variance(p.sigma_h2, static_cast<double>(p.pilot_length),
                                     p.pilot_power, p.sigma_z2)) {}

  void run(std::uint64_t seed, std::int64_t block, PipelineStats& stats) const {
    Philox4x32 rng(seed, static_cast<std::uint64_t>(block));
    std::normal_distribution<double> normal;
    double best = 0.0;
    for (std::int64_t k = 0; k < users; ++k) {
      const double h_re = h_scale * normal(rng);
      const double h_im = h_scale * normal(rng);
      const double z_re = z_scale * normal(rng);
      const double z_im = z_scale * normal(rng);
      const double est_re = estimator * (pilot_amp * h_re + z_re);
      const double est_im = estimator * (pilot_amp * h_im + z_im);
      const double e_re = h_re - est_re;
      const double e_im = h_im - est_im;
      const double g = est_re * est_re + est_im * est_im;
      stats.err2.add(e_re * e_re + e_im * e_im);
      stats.hhat2.add(g);
      stats.cross.add(est_re * e_re + est_im * e_im);
      best = std::max(best, g);
    }
    stats.max_hhat2.add(best);
    const double rate =
        data_power > 0.0
            ? (1.0 - alpha) * std::log1p(data_power * best / (data_power * sigma_e2 + sigma_z2))
            : 0.0;
    stats.rate.add(rate);
  }
};

std::int64_t chunk_count(std::int64_t n_blocks) {
  return (n_blocks + kSimChunkBlocks - 1) / kSimChunkBlocks;
}

// Runs `body(block, acc)` for every block. Serial: one accumulator in block
// order. Parallel: one accumulator per fixed-size chunk, merged in order.
template <class Acc, class Body>
Acc run_blocks(std::int64_t n_blocks, Exec exec, const Body& body) {
  Acc total;
  if (exec == Exec::serial) {
    for (std::int64_t b = 0; b < n_blocks; ++b) body(b, total);
    return total;
  }
  const std::int64_t chunks = chunk_count(n_blocks);
  std::vector<Acc> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t end = std::min(n_blocks, (c + 1) * kSimChunkBlocks);
    Acc& acc = partial[static_cast<std::size_t>(c)];
    for (std::int64_t b = c * kSimChunkBlocks; b < end; ++b) body(b, acc);
  }
  for (const Acc& acc : partial) total.merge(acc);
  return total;
}

}  // namespace

PipelineParams pipeline_params(const TrainingPolicy& policy, const SystemConfig& config) {
  return {policy.users(),       policy.pilot_length(), policy.alpha(),  policy.pilot_power(),
          policy.data_power(),  config.sigma_h2(),     config.sigma_z2()};
}

SimOutcome simulate_pipeline(const PipelineParams& params, std::int64_t n_blocks,
                             std::uint64_t seed, Exec exec) {
  require(n_blocks >= 1, "simulate_pipeline: n_blocks must be >= 1");
  require(params.users >= 1 && params.pilot_length >= 1, "simulate_pipeline: need K, T >= 1");
  require(params.alpha >= 0.0 && params.alpha < 1.0, "simulate_pipeline: alpha in [0,1)");
  require(params.pilot_power >= 0.0 && params.data_power >= 0.0,
          "simulate_pipeline: powers must be >= 0");
  require(params.sigma_h2 > 0.0 && params.sigma_z2 > 0.0,
          "simulate_pipeline: variances must be > 0");

  const BlockModel model(params);
  const PipelineStats s = run_blocks<PipelineStats>(
      n_blocks, exec,
      [&](std::int64_t b, PipelineStats& acc) { model.run(seed, b, acc); });

  SimOutcome out;
  out.mean_rate = s.rate.mean;
  out.rate_std = std::sqrt(s.rate.variance());
  if (n_blocks > 1)
    out.ci_halfwidth_99 = kZ99 * out.rate_std / std::sqrt(static_cast<double>(n_blocks));
  out.n_blocks = n_blocks;
  out.seed = seed;
  out.empirical_sigma_e2 = s.err2.mean;
  out.sigma_e2_std_error = s.err2.std_error();
  out.empirical_sigma_hhat2 = s.hhat2.mean;
  out.sigma_hhat2_std_error = s.hhat2.std_error();
  out.empirical_max_hhat2_mean = s.max_hhat2.mean;
  out.max_hhat2_std_error = s.max_hhat2.std_error();
  out.cross_moment = s.cross.mean;
  out.cross_moment_std_error = s.cross.std_error();
  return out;
}

SimOutcome simulate_blocks(const TrainingPolicy& policy, const SystemConfig& config,
                           std::int64_t n_blocks, std::uint64_t seed, Exec exec) {
  return simulate_pipeline(pipeline_params(policy, config), n_blocks, seed, exec);
}

MeanEstimate empirical_max_estimate_mean(std::int64_t users, std::int64_t n_blocks,
                                         std::uint64_t seed, Exec exec) {
  require(users >= 1, "empirical_max_estimate_mean: K must be >= 1");
  require(n_blocks >= 1, "empirical_max_estimate_mean: n_blocks must be >= 1");
  const RunningStats s =
      run_blocks<RunningStats>(n_blocks, exec, [&](std::int64_t b, RunningStats& acc) {
        Philox4x32 rng(seed, static_cast<std::uint64_t>(b));
        std::exponential_distribution<double> unit_exp;
        double best = 0.0;
        for (std::int64_t k = 0; k < users; ++k) best = std::max(best, unit_exp(rng));
        acc.add(best);
      });
  return {s.mean, s.std_error(), s.n};
}

bool single_user_scheduling_dominates(std::span<const double> estimate_gains,
                                      double total_power, double sigma_e2, double sigma_z2,
                                      std::uint64_t seed, int n_splits) {
  require(!estimate_gains.empty(), "single_user_scheduling_dominates: no users");
  require(total_power > 0.0 && sigma_e2 >= 0.0 && sigma_z2 > 0.0,
          "single_user_scheduling_dominates: invalid powers");

  const double noise = sigma_e2 * total_power + sigma_z2;
  auto objective = [&](std::span<const double> powers) {
    double signal = 0.0;
    for (std::size_t k = 0; k < powers.size(); ++k) signal += powers[k] * estimate_gains[k];
    return std::log1p(signal / noise);
  };

  const std::size_t n = estimate_gains.size();
  const auto best = static_cast<std::size_t>(
      std::max_element(estimate_gains.begin(), estimate_gains.end()) - estimate_gains.begin());
  std::vector<double> powers(n, 0.0);
  powers[best] = total_power;
  const double single = objective(powers);

  Philox4x32 rng(seed, 0);
  std::exponential_distribution<double> unit_exp;
  std::bernoulli_distribution coin(0.5);
  std::vector<std::size_t> order(n);
  for (int trial = 0; trial < n_splits; ++trial) {
    std::fill(powers.begin(), powers.end(), 0.0);
    // random non-empty subset with Dirichlet(1,...,1) weights over it
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0 || coin(rng)) {
        powers[order[i]] = unit_exp(rng);
        weight_sum += powers[order[i]];
      }
    }
    for (double& p : powers) p *= total_power / weight_sum;
    const double split = objective(powers);
    if (single < split - 1e-14 * std::abs(split)) return false;
  }
  return true;
}

}  // namespace mudiv
