#pragma once

// Optimal training parameters.
//
// For fixed K the rate is maximized by one pilot symbol per user
// (alpha = K/L) and by the training power fraction minimizing the effective
// inverse SNR, which is the positive root of
//
//   S(1-2a) e^2 + (2a(S+1) - 2a^2) e + a^2 - a(S+1) = 0.
//
// K itself is found by exhaustive search over 1..L-1, or approximately by
// maximizing approx_rate_a2().

#include <cstdint>
#include <optional>
#include <vector>

#include "mudiv/core_model.hpp"
#include "mudiv/kernels.hpp"
#include "mudiv/rate_eval.hpp"

namespace mudiv {

/// K/L, the training time fraction with one pilot symbol per user.
double optimal_alpha(std::int64_t users, std::int64_t block_length);

/// Positive root of the quadratic above; exactly 1/2 at alpha = 1/2.
double optimal_eps_bar(double alpha, double snr);

/// Left side of the quadratic at eps_bar.
double eps_bar_quadratic(double alpha, double snr, double eps_bar);

/// eps_bar_quadratic() divided by the largest coefficient magnitude.
double eps_bar_quadratic_residual(double alpha, double snr, double eps_bar);

/// Numerator of dx/d(eps_bar):
///   a^2(1-2e) - a(2Se^2 - 2Se + S - 2e + 1) + Se^2.
/// The denominator S^2 (1-e)^2 e^2 is positive, so this carries the sign.
double eps_bar_derivative_numerator(double alpha, double snr, double eps_bar);

/// Policy with alpha = K/L and the optimal power fraction.
TrainingPolicy optimal_policy(const SystemConfig& config, std::int64_t users);

struct OptimizationReport {
  std::int64_t k_star;
  TrainingPolicy policy;
  RateResult rate;
  double quadratic_residual;
  std::vector<SweepPoint> sweep;
};

/// Exhaustive search over K in [1, k_max] (default L-1). Ties go to the
/// smaller K; the result does not depend on `exec` or the thread count.
OptimizationReport optimal_user_count(const SystemConfig& config, Exec exec = Exec::parallel,
                                      std::optional<std::int64_t> k_max = std::nullopt);

/// argmax of approx_rate_a2 over K in [2, L-1], smallest K on ties.
/// Requires L >= 3.
std::int64_t approx_user_count(std::int64_t block_length, double snr);
std::int64_t approx_user_count(const SystemConfig& config);

/// argmax of approx_rate_a1 (with x at the optimal eps_bar) over K in [2, L-1].
std::int64_t approx_a1_user_count(const SystemConfig& config);

/// L * d(approx_rate_a2)/dK written as LHS - RHS of the stationarity
/// condition
///
///   S(L-K)(2g - c sqrt(K/L) log K) / (2K(S g log K + 1)) = log(1 + S g log K)
///
/// with c = 2 sqrt((S+1)/S) and g = 1 - c sqrt(K/L). Positive below the
/// maximizer, negative above. Throws DomainError where 1 + S g log K <= 0.
double stationarity_residual(double users, double block_length, double snr);

}  // namespace mudiv
