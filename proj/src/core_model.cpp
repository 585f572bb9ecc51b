#include "mudiv/core_model.hpp"

#include <cmath>

#include "mudiv/errors.hpp"

namespace mudiv {

using detail::require;

SystemConfig::SystemConfig(double power, double sigma_h2, double sigma_z2,
                           std::int64_t block_length)
    : power_(power), sigma_h2_(sigma_h2), sigma_z2_(sigma_z2), block_length_(block_length) {
  require(std::isfinite(power) && power > 0.0, "SystemConfig: power must be > 0");
  require(std::isfinite(sigma_h2) && sigma_h2 > 0.0, "SystemConfig: sigma_h2 must be > 0");
  require(std::isfinite(sigma_z2) && sigma_z2 > 0.0, "SystemConfig: sigma_z2 must be > 0");
  require(block_length >= 2, "SystemConfig: block length must be >= 2");
}

SystemConfig SystemConfig::with_block_length(std::int64_t block_length) const {
  return SystemConfig(power_, sigma_h2_, sigma_z2_, block_length);
}

TrainingPolicy TrainingPolicy::from_pilot(const SystemConfig& config, std::int64_t users,
                                          std::int64_t pilot_length, double pilot_power) {
  const std::int64_t L = config.block_length();
  require(users >= 1 && users <= L - 1, "TrainingPolicy: users must lie in [1, L-1]");
  require(pilot_length >= 1, "TrainingPolicy: pilot length must be >= 1");
  require(users * pilot_length < L, "TrainingPolicy: training must leave data symbols");
  require(std::isfinite(pilot_power) && pilot_power > 0.0,
          "TrainingPolicy: pilot power must be > 0");

  TrainingPolicy p;
  p.users_ = users;
  p.pilot_length_ = pilot_length;
  p.alpha_ = static_cast<double>(users * pilot_length) / static_cast<double>(L);
  p.pilot_power_ = pilot_power;
  p.data_power_ = mudiv::data_power(config.power(), p.alpha_, pilot_power);
  p.eps_bar_ = p.alpha_ * pilot_power / config.power();
  return p;
}

TrainingPolicy TrainingPolicy::from_power_fraction(const SystemConfig& config,
                                                   std::int64_t users, double eps_bar) {
  const std::int64_t L = config.block_length();
  require(users >= 1 && users <= L - 1, "TrainingPolicy: users must lie in [1, L-1]");
  require(eps_bar > 0.0 && eps_bar < 1.0, "TrainingPolicy: eps_bar must lie in (0,1)");

  TrainingPolicy p;
  p.users_ = users;
  p.pilot_length_ = 1;
  p.alpha_ = static_cast<double>(users) / static_cast<double>(L);
  p.eps_bar_ = eps_bar;
  p.pilot_power_ = eps_bar * config.power() / p.alpha_;
  // (P - eps P) / (1 - alpha), written without the alpha * P_T round trip
  p.data_power_ = config.power() * (1.0 - eps_bar) / (1.0 - p.alpha_);
  return p;
}

double mmse_error_variance(double sigma_h2, double pilot_length, double pilot_power,
                           double sigma_z2) {
  require(sigma_h2 > 0.0 && sigma_z2 > 0.0, "mmse_error_variance: variances must be > 0");
  require(pilot_length >= 0.0 && pilot_power >= 0.0,
          "mmse_error_variance: pilot energy must be >= 0");
  // sigma_h2 * (1 - g/(g + sigma_z2)) with g = sigma_h2 T P_T
  const double g = sigma_h2 * pilot_length * pilot_power;
  return sigma_h2 * sigma_z2 / (g + sigma_z2);
}

namespace {
double estimate_variance(double sigma_h2, double pilot_length, double pilot_power,
                         double sigma_z2) {
  const double g = sigma_h2 * pilot_length * pilot_power;
  return sigma_h2 * g / (g + sigma_z2);
}
}  // namespace

double data_power(double power, double alpha, double pilot_power) {
  require(alpha > 0.0 && alpha < 1.0, "data_power: alpha must lie in (0,1)");
  require(power > 0.0 && pilot_power >= 0.0, "data_power: powers must be non-negative");
  if (alpha * pilot_power >= power)
    throw InfeasiblePolicyError("data_power: training consumes the whole power budget");
  return (power - alpha * pilot_power) / (1.0 - alpha);
}

double effective_inverse_snr(double alpha, double eps_bar, double snr) {
  require(alpha > 0.0 && alpha < 1.0, "effective_inverse_snr: alpha must lie in (0,1)");
  require(eps_bar > 0.0 && eps_bar < 1.0, "effective_inverse_snr: eps_bar must lie in (0,1)");
  require(snr > 0.0, "effective_inverse_snr: snr must be > 0");
  const double u = alpha / (snr * eps_bar);
  const double v = (1.0 - alpha) / (snr * (1.0 - eps_bar));
  return u + v + u * v;  // (1+u)(1+v) - 1
}

double effective_inverse_snr(const TrainingPolicy& policy, const SystemConfig& config) {
  require(policy.pilot_length() == 1,
          "effective_inverse_snr: closed form needs one pilot symbol per user");
  return effective_inverse_snr(policy.alpha(), policy.eps_bar(), config.snr());
}

double effective_inverse_snr_direct(const TrainingPolicy& policy, const SystemConfig& config) {
  return estimation_stats(policy, config).x;
}

EstimationStats estimation_stats(const TrainingPolicy& policy, const SystemConfig& config) {
  const auto T = static_cast<double>(policy.pilot_length());
  const double e2 =
      mmse_error_variance(config.sigma_h2(), T, policy.pilot_power(), config.sigma_z2());
  const double h2 =
      estimate_variance(config.sigma_h2(), T, policy.pilot_power(), config.sigma_z2());
  const double pd = policy.data_power();
  return {e2, h2, (pd * e2 + config.sigma_z2()) / (pd * h2)};
}

}  // namespace mudiv
