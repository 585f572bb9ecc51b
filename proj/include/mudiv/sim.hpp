#pragma once

// Monte Carlo simulator of the training / estimation / scheduling pipeline.
//
// Block b draws all of its randomness from Philox4x32(seed, b), so results
// do not depend on how blocks are spread over threads. Blocks are reduced in
// fixed chunks of kSimChunkBlocks merged in chunk order; the parallel path is
// therefore bit-identical for any thread count. The serial reference path
// accumulates block by block and agrees with it to rounding.
//
// Complex Gaussians CN(0, v) are drawn as two independent real N(0, v/2).

#include <cstdint>
#include <optional>
#include <span>

#include "mudiv/kernels.hpp"

namespace mudiv {

class SystemConfig;
class TrainingPolicy;

inline constexpr std::int64_t kSimChunkBlocks = 1024;
inline constexpr double kZ99 = 2.576;

/// Raw pipeline parameters. Unlike TrainingPolicy this admits the degenerate
/// data_power == 0 point.
struct PipelineParams {
  std::int64_t users = 1;
  std::int64_t pilot_length = 1;
  double alpha = 0.0;
  double pilot_power = 0.0;
  double data_power = 0.0;
  double sigma_h2 = 1.0;
  double sigma_z2 = 1.0;
};

PipelineParams pipeline_params(const TrainingPolicy& policy, const SystemConfig& config);

struct SimOutcome {
  double mean_rate = 0.0;
  std::optional<double> ci_halfwidth_99;  // undefined for a single block
  std::int64_t n_blocks = 0;
  double empirical_sigma_e2 = 0.0;        // mean |h - hhat|^2 over users and blocks
  double empirical_max_hhat2_mean = 0.0;  // mean of max_k |hhat_k|^2
  std::uint64_t seed = 0;

  double rate_std = 0.0;
  double sigma_e2_std_error = 0.0;
  double empirical_sigma_hhat2 = 0.0;  // mean |hhat|^2
  double sigma_hhat2_std_error = 0.0;
  double max_hhat2_std_error = 0.0;
  double cross_moment = 0.0;  // mean Re(hhat conj(h - hhat)), zero for MMSE
  double cross_moment_std_error = 0.0;
};

/// Simulates n_blocks coherence blocks. Per block: K gains h ~ CN(0, sh),
/// pilot observations y = sqrt(T P_T) h + z with z ~ CN(0, sz), MMSE
/// estimates hhat = sh sqrt(T P_T) / (sh T P_T + sz) y, then the rate
///   (1 - alpha) log(1 + P_D max|hhat|^2 / (P_D sigma_e^2 + sz))
/// with sigma_e^2 the analytic MMSE error variance.
SimOutcome simulate_pipeline(const PipelineParams& params, std::int64_t n_blocks,
                             std::uint64_t seed, Exec exec = Exec::parallel);

/// simulate_pipeline() for a validated policy.
SimOutcome simulate_blocks(const TrainingPolicy& policy, const SystemConfig& config,
                           std::int64_t n_blocks, std::uint64_t seed,
                           Exec exec = Exec::parallel);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
};

/// Monte Carlo mean of the maximum of K unit exponentials (expected: H_K).
MeanEstimate empirical_max_estimate_mean(std::int64_t users, std::int64_t n_blocks,
                                         std::uint64_t seed, Exec exec = Exec::parallel);

/// Checks that giving all of `total_power` to the strongest estimate
/// maximizes log(1 + sum_k P_k g_k / (sigma_e2 sum_k P_k + sigma_z2)) against
/// `n_splits` random power splits over random user subsets. Comparisons allow
/// a relative slack of 1e-14 for rounding in the split sums.
bool single_user_scheduling_dominates(std::span<const double> estimate_gains,
                                      double total_power, double sigma_e2, double sigma_z2,
                                      std::uint64_t seed, int n_splits = 100);

}  // namespace mudiv
