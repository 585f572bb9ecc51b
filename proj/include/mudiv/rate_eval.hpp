#pragma once

// Achievable-rate lower bound for strongest-estimate scheduling, its
// large-L approximations, and the Jensen upper bound.
//
// With |h1*|^2 the maximum of K unit exponentials and x the effective
// inverse SNR, the rate is
//
//   C = (1 - alpha) E[ log(1 + |h1*|^2 / x) ].
//
// expected_log_max() evaluates the expectation by adaptive Gauss-Kronrod
// quadrature; expected_log_max_series() is an exact inclusion-exclusion sum
// over exponential integrals in 50-digit arithmetic and exists to cross-check
// the quadrature at small K.

#include <cstdint>
#include <string_view>

namespace mudiv {

class SystemConfig;
class TrainingPolicy;

enum class RateMethod { quadrature, series, monte_carlo, closed_approx };

std::string_view to_string(RateMethod method);

struct RateResult {
  double value = 0.0;         // nats per channel use
  RateMethod method = RateMethod::quadrature;
  double err_estimate = 0.0;  // absolute error bound or CI half-width
  std::int64_t n_samples = 0; // Monte Carlo only
};

struct QuadratureValue {
  double value = 0.0;
  double abs_error = 0.0;
};

/// CDF of the maximum of K unit exponentials, (1 - e^{-t})^K.
double max_exp_cdf(double t, std::int64_t users);

/// E[log(1 + M/x)], M the maximum of K unit exponentials.
///
/// Integrated by parts to int_0^inf P(M > t)/(x + t) dt, then mapped with
/// t = x (e^s - 1) so the integrand becomes P(M > x(e^s - 1)), a smooth
/// step from 1 to 0 whose shape does not depend on K. The range is cut where
/// P(M > t) < K e^{-t} is below 1e-17 and that tail bound is added to the
/// reported error.
QuadratureValue expected_log_max(std::int64_t users, double x);

/// Largest K accepted by expected_log_max_series().
inline constexpr std::int64_t kSeriesMaxUsers = 30;

/// sum_{k=1}^K (-1)^{k+1} C(K,k) e^{kx} E1(kx). Throws UnsupportedRangeError
/// for K > kSeriesMaxUsers.
double expected_log_max_series(std::int64_t users, double x);

/// (1 - alpha) E[log(1 + M/x)] for explicit (K, alpha, x).
RateResult achievable_rate(std::int64_t users, double alpha, double x);

/// Rate of a policy. Uses the closed-form x for one pilot symbol per user and
/// the direct MMSE route otherwise.
RateResult achievable_rate(const TrainingPolicy& policy, const SystemConfig& config);

/// (1 - alpha) log(1 + H_K / x), an upper bound on the rate since
/// E[M] = H_K.
double jensen_upper_bound(std::int64_t users, double alpha, double x);
double jensen_upper_bound(const TrainingPolicy& policy, const SystemConfig& config);

/// (1 - K/L) log(1 + log(K)/x). K is real so the formula can be probed
/// between integers.
double approx_rate_a1(double users, double block_length, double x);

/// Value returned by approx_rate_a2() where its log argument is not positive.
inline constexpr double kRateSentinel = -1.0e308;

/// (1 - K/L) log(1 + S (1 - 2 sqrt((S+1)/S) sqrt(K/L)) log K), or
/// kRateSentinel when the log argument is <= 0 (large K/L).
double approx_rate_a2(double users, double block_length, double snr);

}  // namespace mudiv
