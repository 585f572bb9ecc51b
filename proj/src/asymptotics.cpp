#include "mudiv/asymptotics.hpp"

#include <cmath>

#include "mudiv/core_model.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/optimizer.hpp"
#include "mudiv/special_functions.hpp"

namespace mudiv {

using detail::require;

ExpansionResult ExpansionResult::make(double first, double second,
                                      std::optional<double> exact) {
  ExpansionResult r;
  r.first_order = first;
  r.second_order = second;
  r.exact = exact;
  if (exact) {
    const double denom = std::abs(*exact);
    r.rel_err_first = std::abs(*exact - first) / denom;
    r.rel_err_second = std::abs(*exact - second) / denom;
  }
  return r;
}

namespace {
void check_ratio(double users, double block_length, double snr) {
  require(users >= 1.0 && users < block_length, "expansion: need 1 <= K < L");
  require(snr > 0.0, "expansion: snr must be > 0");
}
}  // namespace

ExpansionResult eps_bar_expansion(double users, double block_length, double snr) {
  check_ratio(users, block_length, snr);
  const double q = (snr + 1.0) / snr;
  const double ratio = users / block_length;
  const double first = std::sqrt(q) * std::sqrt(ratio);
  return ExpansionResult::make(first, first - q * ratio, optimal_eps_bar(ratio, snr));
}

ExpansionResult training_power_expansion(double users, double block_length, double snr,
                                         double power) {
  check_ratio(users, block_length, snr);
  require(power > 0.0, "training_power_expansion: power must be > 0");
  const double q = (snr + 1.0) / snr;
  const double first = power * std::sqrt(q) * std::sqrt(block_length / users);
  const double exact = optimal_eps_bar(users / block_length, snr) * power * block_length / users;
  return ExpansionResult::make(first, first - power * q, exact);
}

ExpansionResult error_variance_expansion(double users, double block_length, double snr,
                                         double power, double sigma_z2) {
  check_ratio(users, block_length, snr);
  require(power > 0.0 && sigma_z2 > 0.0, "error_variance_expansion: need P, sigma_z2 > 0");
  const double scale = sigma_z2 / power;
  const double q = snr / (snr + 1.0);
  const double ratio = users / block_length;
  const double first = scale * std::sqrt(q) * std::sqrt(ratio);
  const double pilot = optimal_eps_bar(ratio, snr) * power / ratio;
  const double sigma_h2 = snr * sigma_z2 / power;
  const double exact = mmse_error_variance(sigma_h2, 1.0, pilot, sigma_z2);
  return ExpansionResult::make(first, first + scale * q * ratio, exact);
}

double implicit_L_of_K(double users, double snr) {
  require(users >= 3.0, "implicit_L_of_K: K must be >= 3");
  require(snr > 0.0, "implicit_L_of_K: snr must be > 0");
  const double lk = ln(users);
  return (snr + 1.0) / snr * users * lk * lk + 2.0 * users * lk * lnln(users);
}

AsymptoticParameters asymptotic_parameters_only(double block_length, double snr, double power,
                                                double sigma_z2) {
  require(block_length >= 16.0, "asymptotic_parameters: L must be >= 16");
  require(snr > 0.0 && power > 0.0 && sigma_z2 > 0.0,
          "asymptotic_parameters: S, P, sigma_z2 must be > 0");
  const double L = block_length;
  const double lL = ln(L);
  const double llL = lnln(L);
  const double s = snr;
  const double k_lead = s / (s + 1.0);
  const double k_corr = s * (2.0 * s + 4.0) / ((s + 1.0) * (s + 1.0));

  AsymptoticParameters out;
  const double a1 = k_lead / (lL * lL);
  const double a2 = a1 + k_corr * llL / (lL * lL * lL);
  out.alpha = ExpansionResult::make(a1, a2, std::nullopt);
  out.users = ExpansionResult::make(L * a1, L * a2, std::nullopt);

  const double e1 = 1.0 / lL;
  out.eps_bar =
      ExpansionResult::make(e1, e1 + (s + 2.0) / (s + 1.0) * llL / (lL * lL), std::nullopt);

  const double p1 = power * (s + 1.0) / s * lL;
  out.pilot_power = ExpansionResult::make(p1, p1 - power * (s + 2.0) / s * llL, std::nullopt);

  const double scale = sigma_z2 / power;
  const double v1 = scale / lL;
  const double v2 = v1 + scale * s * (s + 2.0) / ((s + 1.0) * (s + 1.0)) * llL / (lL * lL);
  out.error_variance = ExpansionResult::make(v1, v2, std::nullopt);
  return out;
}

AsymptoticParameters asymptotic_parameters(std::int64_t block_length, double snr, double power,
                                           double sigma_z2) {
  AsymptoticParameters out =
      asymptotic_parameters_only(static_cast<double>(block_length), snr, power, sigma_z2);

  const std::int64_t k = approx_user_count(block_length, snr);
  const double alpha = optimal_alpha(k, block_length);
  const double eps = optimal_eps_bar(alpha, snr);
  const double pilot = eps * power / alpha;
  const double sigma_h2 = snr * sigma_z2 / power;

  auto attach = [](ExpansionResult& r, double exact) {
    r = ExpansionResult::make(r.first_order, r.second_order, exact);
  };
  out.k_approx = k;
  attach(out.users, static_cast<double>(k));
  attach(out.alpha, alpha);
  attach(out.eps_bar, eps);
  attach(out.pilot_power, pilot);
  attach(out.error_variance, mmse_error_variance(sigma_h2, 1.0, pilot, sigma_z2));
  return out;
}

double asymptotic_rate(double block_length, double snr) {
  require(block_length > std::exp(1.0), "asymptotic_rate: L must exceed e");
  require(snr > 0.0, "asymptotic_rate: snr must be > 0");
  return lnln(block_length) + ln(snr);
}

}  // namespace mudiv
