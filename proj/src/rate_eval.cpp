#include "mudiv/rate_eval.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "mudiv/core_model.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/special_functions.hpp"

namespace mudiv {

using detail::require;

namespace {
constexpr double kQuadratureRelTol = 1e-10;
constexpr unsigned kQuadratureMaxDepth = 30;
constexpr double kTailCut = 40.0;  // e^{-40} ~ 4e-18
}  // namespace

std::string_view to_string(RateMethod method) {
  switch (method) {
    case RateMethod::quadrature: return "quadrature";
    case RateMethod::series: return "series";
    case RateMethod::monte_carlo: return "monte-carlo";
    case RateMethod::closed_approx: return "closed-approx";
  }
  return "unknown";
}

double max_exp_cdf(double t, std::int64_t users) {
  require(t >= 0.0, "max_exp_cdf: t must be >= 0");
  require(users >= 1, "max_exp_cdf: K must be >= 1");
  return std::exp(static_cast<double>(users) * std::log1p(-std::exp(-t)));
}

QuadratureValue expected_log_max(std::int64_t users, double x) {
  require(users >= 1, "expected_log_max: K must be >= 1");
  require(std::isfinite(x) && x > 0.0, "expected_log_max: x must be > 0");

  const auto k = static_cast<double>(users);
  const double t_max = std::log(k) + kTailCut;
  const double s_max = std::log1p(t_max / x);
  auto survival = [k, x](double s) {
    const double t = x * std::expm1(s);
    return -std::expm1(k * std::log1p(-std::exp(-t)));
  };

  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      survival, 0.0, s_max, kQuadratureMaxDepth, kQuadratureRelTol, &err);
  // int_{t_max}^inf K e^{-t}/(x+t) dt <= K e^{-t_max}/(x + t_max)
  const double tail = std::exp(-kTailCut) / (x + t_max);
  return {v, err + tail};
}

double expected_log_max_series(std::int64_t users, double x) {
  if (users < 1) throw DomainError("expected_log_max_series: K must be >= 1");
  if (users > kSeriesMaxUsers)
    throw UnsupportedRangeError("expected_log_max_series: K > 30 loses all precision");
  require(std::isfinite(x) && x > 0.0, "expected_log_max_series: x must be > 0");

  // The alternating binomial sum cancels ~10 digits at K = 30, hence 50
  // digits of working precision.
  using Real = boost::multiprecision::cpp_bin_float_50;
  const Real xr = x;
  Real sum = 0;
  Real binom = 1;
  for (std::int64_t i = 1; i <= users; ++i) {
    binom = binom * (users - i + 1) / i;
    const Real term = binom * expint_e1_scaled(Real(i) * xr);
    if (i % 2 == 1)
      sum += term;
    else
      sum -= term;
  }
  return sum.convert_to<double>();
}

RateResult achievable_rate(std::int64_t users, double alpha, double x) {
  require(alpha >= 0.0 && alpha < 1.0, "achievable_rate: alpha must lie in [0,1)");
  const QuadratureValue e = expected_log_max(users, x);
  return {(1.0 - alpha) * e.value, RateMethod::quadrature, (1.0 - alpha) * e.abs_error, 0};
}

RateResult achievable_rate(const TrainingPolicy& policy, const SystemConfig& config) {
  const double x = policy.pilot_length() == 1 ? effective_inverse_snr(policy, config)
                                              : effective_inverse_snr_direct(policy, config);
  return achievable_rate(policy.users(), policy.alpha(), x);
}

double jensen_upper_bound(std::int64_t users, double alpha, double x) {
  require(users >= 1, "jensen_upper_bound: K must be >= 1");
  require(alpha >= 0.0 && alpha < 1.0, "jensen_upper_bound: alpha must lie in [0,1)");
  require(x > 0.0, "jensen_upper_bound: x must be > 0");
  return (1.0 - alpha) * std::log1p(harmonic_number(users) / x);
}

double jensen_upper_bound(const TrainingPolicy& policy, const SystemConfig& config) {
  const double x = policy.pilot_length() == 1 ? effective_inverse_snr(policy, config)
                                              : effective_inverse_snr_direct(policy, config);
  return jensen_upper_bound(policy.users(), policy.alpha(), x);
}

double approx_rate_a1(double users, double block_length, double x) {
  require(users >= 1.0 && users < block_length, "approx_rate_a1: need 1 <= K < L");
  require(x > 0.0, "approx_rate_a1: x must be > 0");
  return (1.0 - users / block_length) * std::log1p(ln(users) / x);
}

double approx_rate_a2(double users, double block_length, double snr) {
  require(users >= 1.0 && users < block_length, "approx_rate_a2: need 1 <= K < L");
  require(snr > 0.0, "approx_rate_a2: snr must be > 0");
  const double c = 2.0 * std::sqrt((snr + 1.0) / snr);
  const double arg = 1.0 + snr * (1.0 - c * std::sqrt(users / block_length)) * ln(users);
  if (!(arg > 0.0)) return kRateSentinel;
  return (1.0 - users / block_length) * ln(arg);
}

}  // namespace mudiv
