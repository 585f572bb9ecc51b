#pragma once

// System constants, power accounting and MMSE estimation statistics for the
// training-based multiple-access channel. All quantities are linear (no dB).

#include <cstdint>

namespace mudiv {

/// Physical constants of the channel. Immutable once constructed.
class SystemConfig {
 public:
  /// Throws DomainError unless power, variances > 0 and block_length >= 2.
  SystemConfig(double power, double sigma_h2, double sigma_z2, std::int64_t block_length);

  double power() const { return power_; }
  double sigma_h2() const { return sigma_h2_; }
  double sigma_z2() const { return sigma_z2_; }
  std::int64_t block_length() const { return block_length_; }

  /// Overall SNR S = P * sigma_h^2 / sigma_z^2.
  double snr() const { return power_ * sigma_h2_ / sigma_z2_; }

  /// Same channel with a different block length.
  SystemConfig with_block_length(std::int64_t block_length) const;

 private:
  double power_;
  double sigma_h2_;
  double sigma_z2_;
  std::int64_t block_length_;
};

/// A fully resolved training operating point.
///
/// Only the named constructors create policies; they derive the time
/// fraction, the training power fraction and the data power together so the
/// power budget is always met with equality.
class TrainingPolicy {
 public:
  /// K users each sending `pilot_length` pilot symbols at power `pilot_power`.
  /// Throws DomainError for K, pilot_length or alpha out of range and
  /// InfeasiblePolicyError when alpha * pilot_power >= P.
  static TrainingPolicy from_pilot(const SystemConfig& config, std::int64_t users,
                                   std::int64_t pilot_length, double pilot_power);

  /// One pilot symbol per user, with a fraction `eps_bar` of the total
  /// energy budget spent on training (eps_bar in (0,1)).
  static TrainingPolicy from_power_fraction(const SystemConfig& config, std::int64_t users,
                                            double eps_bar);

  std::int64_t users() const { return users_; }
  std::int64_t pilot_length() const { return pilot_length_; }
  double alpha() const { return alpha_; }
  double eps_bar() const { return eps_bar_; }
  double pilot_power() const { return pilot_power_; }
  double data_power() const { return data_power_; }

 private:
  TrainingPolicy() = default;

  std::int64_t users_ = 0;
  std::int64_t pilot_length_ = 0;
  double alpha_ = 0.0;
  double eps_bar_ = 0.0;
  double pilot_power_ = 0.0;
  double data_power_ = 0.0;
};

struct EstimationStats {
  double sigma_e2;     // MMSE error variance
  double sigma_hhat2;  // variance of the channel estimate
  double x;            // effective inverse SNR
};

/// MMSE error variance after `pilot_length` pilot symbols at `pilot_power`:
///   sigma_h2 * (1 - sigma_h2*T*P_T / (sigma_h2*T*P_T + sigma_z2)).
/// `pilot_length` is real so that the energy T*P_T can be varied freely.
double mmse_error_variance(double sigma_h2, double pilot_length, double pilot_power,
                           double sigma_z2);

/// Data power meeting the average power constraint with equality,
/// (P - alpha*P_T) / (1 - alpha).
double data_power(double power, double alpha, double pilot_power);

/// Effective inverse SNR with one pilot symbol per user, in closed form:
///   (1 + alpha/(S eps)) (1 + (1-alpha)/(S (1-eps))) - 1.
double effective_inverse_snr(double alpha, double eps_bar, double snr);

/// Closed-form effective inverse SNR for a policy; requires pilot_length == 1.
double effective_inverse_snr(const TrainingPolicy& policy, const SystemConfig& config);

/// (P_D sigma_e^2 + sigma_z^2) / (P_D sigma_hhat^2) evaluated from the MMSE
/// statistics directly. Valid for any pilot length.
double effective_inverse_snr_direct(const TrainingPolicy& policy, const SystemConfig& config);

/// Error/estimate variances and x for a policy (x via the direct route).
EstimationStats estimation_stats(const TrainingPolicy& policy, const SystemConfig& config);

}  // namespace mudiv
