#pragma once

// First- and second-order large-L expressions for the optimal parameters,
// and the helpers used to measure how fast exact optima approach them.
// Remainder terms are dropped; accuracy claims are tested as trends.

#include <cstdint>
#include <optional>

namespace mudiv {

struct ExpansionResult {
  double first_order = 0.0;
  double second_order = 0.0;
  std::optional<double> exact;
  std::optional<double> rel_err_first;
  std::optional<double> rel_err_second;

  /// Builds a result and fills the relative errors against `exact`.
  static ExpansionResult make(double first, double second, std::optional<double> exact);
};

/// eps_bar* ~ sqrt((S+1)/S) sqrt(K/L) - ((S+1)/S) K/L, exact from the closed form.
ExpansionResult eps_bar_expansion(double users, double block_length, double snr);

/// P_T* ~ P sqrt((S+1)/S) sqrt(L/K) - P (S+1)/S, exact = eps_bar* P L / K.
ExpansionResult training_power_expansion(double users, double block_length, double snr,
                                         double power);

/// sigma_e*^2 ~ (sz/P) sqrt(S/(S+1)) sqrt(K/L) + (sz/P) (S/(S+1)) K/L,
/// exact = MMSE error variance at P_T* with sigma_h^2 = S sz / P.
ExpansionResult error_variance_expansion(double users, double block_length, double snr,
                                         double power, double sigma_z2);

/// Two-term relation between the approximate optimum K_a and L:
///   L ~ ((S+1)/S) K (log K)^2 + 2 K log K log log K.  Requires K >= 3.
double implicit_L_of_K(double users, double snr);

/// Large-L expressions with K = K_a*, plus exact values computed at the
/// integer maximizer of approx_rate_a2.
struct AsymptoticParameters {
  std::int64_t k_approx = 0;  // exact K_a*
  ExpansionResult users;
  ExpansionResult alpha;
  ExpansionResult eps_bar;
  ExpansionResult pilot_power;
  ExpansionResult error_variance;
};

/// Requires L >= 16.
AsymptoticParameters asymptotic_parameters(std::int64_t block_length, double snr, double power,
                                           double sigma_z2);

/// Same expansions without the exact comparators (no K search).
AsymptoticParameters asymptotic_parameters_only(double block_length, double snr, double power,
                                                double sigma_z2);

/// log log L + log S. Requires L > e (log log L > 0) and S > 0.
double asymptotic_rate(double block_length, double snr);

}  // namespace mudiv
