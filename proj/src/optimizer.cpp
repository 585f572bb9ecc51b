#include "mudiv/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "mudiv/errors.hpp"
#include "mudiv/special_functions.hpp"

namespace mudiv {

using detail::require;

double optimal_alpha(std::int64_t users, std::int64_t block_length) {
  require(block_length >= 2, "optimal_alpha: L must be >= 2");
  require(users >= 1 && users <= block_length - 1, "optimal_alpha: K must lie in [1, L-1]");
  return static_cast<double>(users) / static_cast<double>(block_length);
}

double optimal_eps_bar(double alpha, double snr) {
  require(alpha > 0.0 && alpha < 1.0, "optimal_eps_bar: alpha must lie in (0,1)");
  require(snr > 0.0, "optimal_eps_bar: snr must be > 0");
  if (alpha == 0.5) return 0.5;

  const double a = alpha;
  const double s = snr;
  const double half_b = a * (s + 1.0) - a * a;
  const double denom = s * (1.0 - 2.0 * a);
  if (std::abs(1.0 - 2.0 * a) < 1e-9) {
    // quadratic coefficient vanishes: 2 half_b e + a^2 - a(S+1) = 0
    return (a * (s + 1.0) - a * a) / (2.0 * half_b);
  }
  const double disc = a * (s + s * s) + (1.0 - s - s * s) * a * a - 2.0 * a * a * a +
                      a * a * a * a;
  return (-half_b + std::sqrt(disc)) / denom;
}

double eps_bar_quadratic(double alpha, double snr, double eps_bar) {
  const double a = alpha;
  return eps_bar * eps_bar * snr * (1.0 - 2.0 * a) +
         eps_bar * (2.0 * a * (snr + 1.0) - 2.0 * a * a) + a * a - a * (snr + 1.0);
}

double eps_bar_quadratic_residual(double alpha, double snr, double eps_bar) {
  const double a = alpha;
  const double scale = std::max({std::abs(snr * (1.0 - 2.0 * a)),
                                 std::abs(2.0 * a * (snr + 1.0) - 2.0 * a * a),
                                 std::abs(a * a - a * (snr + 1.0))});
  return eps_bar_quadratic(alpha, snr, eps_bar) / scale;
}

double eps_bar_derivative_numerator(double alpha, double snr, double eps_bar) {
  require(alpha > 0.0 && alpha < 1.0, "eps_bar_derivative_numerator: alpha must lie in (0,1)");
  require(eps_bar > 0.0 && eps_bar < 1.0,
          "eps_bar_derivative_numerator: eps_bar must lie in (0,1)");
  const double a = alpha;
  const double e = eps_bar;
  const double s = snr;
  return a * a * (1.0 - 2.0 * e) - a * (2.0 * s * e * e - 2.0 * s * e + s - 2.0 * e + 1.0) +
         s * e * e;
}

TrainingPolicy optimal_policy(const SystemConfig& config, std::int64_t users) {
  const double alpha = optimal_alpha(users, config.block_length());
  return TrainingPolicy::from_power_fraction(config, users,
                                             optimal_eps_bar(alpha, config.snr()));
}

OptimizationReport optimal_user_count(const SystemConfig& config, Exec exec,
                                      std::optional<std::int64_t> k_max) {
  const std::int64_t last = k_max.value_or(config.block_length() - 1);
  require(last >= 1 && last <= config.block_length() - 1,
          "optimal_user_count: k_max must lie in [1, L-1]");

  std::vector<SweepPoint> sweep = sweep_achievable_rates(config, 1, last, exec);
  const SweepPoint& best = sweep[argmax_rate(sweep)];
  TrainingPolicy policy = optimal_policy(config, best.users);
  const RateResult rate{best.rate, RateMethod::quadrature, best.err_estimate, 0};
  const double residual =
      eps_bar_quadratic_residual(policy.alpha(), config.snr(), policy.eps_bar());
  const std::int64_t k_star = best.users;
  return {k_star, policy, rate, residual, std::move(sweep)};
}

std::int64_t approx_user_count(std::int64_t block_length, double snr) {
  require(block_length >= 3, "approx_user_count: L must be >= 3");
  const auto L = static_cast<double>(block_length);
  std::int64_t best = 2;
  double best_rate = approx_rate_a2(2.0, L, snr);
  for (std::int64_t k = 3; k <= block_length - 1; ++k) {
    const double r = approx_rate_a2(static_cast<double>(k), L, snr);
    if (r > best_rate) {
      best_rate = r;
      best = k;
    }
  }
  return best;
}

std::int64_t approx_user_count(const SystemConfig& config) {
  return approx_user_count(config.block_length(), config.snr());
}

std::int64_t approx_a1_user_count(const SystemConfig& config) {
  const std::int64_t L = config.block_length();
  require(L >= 3, "approx_a1_user_count: L must be >= 3");
  const auto Ld = static_cast<double>(L);
  std::int64_t best = 2;
  double best_rate = -1.0;
  for (std::int64_t k = 2; k <= L - 1; ++k) {
    const double x = effective_inverse_snr(optimal_policy(config, k), config);
    const double r = approx_rate_a1(static_cast<double>(k), Ld, x);
    if (r > best_rate) {
      best_rate = r;
      best = k;
    }
  }
  return best;
}

double stationarity_residual(double users, double block_length, double snr) {
  require(users >= 2.0 && users <= block_length - 1.0,
          "stationarity_residual: need 2 <= K <= L-1");
  require(snr > 0.0, "stationarity_residual: snr must be > 0");
  const double c = 2.0 * std::sqrt((snr + 1.0) / snr);
  const double r = std::sqrt(users / block_length);
  const double g = 1.0 - c * r;
  const double lk = ln(users);
  const double inner = snr * g * lk + 1.0;
  require(inner > 0.0, "stationarity_residual: log argument is not positive");
  const double lhs =
      snr * (block_length - users) * (2.0 * g - lk * c * r) / (2.0 * users * inner);
  return lhs - ln(inner);
}

}  // namespace mudiv
