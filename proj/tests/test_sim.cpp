#include <omp.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "mudiv/core_model.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/optimizer.hpp"
#include "mudiv/rate_eval.hpp"
#include "mudiv/sim.hpp"
#include "mudiv/special_functions.hpp"

using namespace mudiv;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool identical(const SimOutcome& a, const SimOutcome& b) {
  return same_bits(a.mean_rate, b.mean_rate) && a.ci_halfwidth_99 == b.ci_halfwidth_99 &&
         a.n_blocks == b.n_blocks && same_bits(a.empirical_sigma_e2, b.empirical_sigma_e2) &&
         same_bits(a.empirical_max_hhat2_mean, b.empirical_max_hhat2_mean) && a.seed == b.seed &&
         same_bits(a.rate_std, b.rate_std) &&
         same_bits(a.empirical_sigma_hhat2, b.empirical_sigma_hhat2) &&
         same_bits(a.cross_moment, b.cross_moment);
}

const SystemConfig kCfg(1.0, 1.0, 0.1, 100);

}  // namespace

TEST_CASE("simulated rate brackets the analytic rate") {
  const TrainingPolicy p = TrainingPolicy::from_power_fraction(kCfg, 5, 0.2);
  const SimOutcome s = simulate_blocks(p, kCfg, 1000000, 2024);
  REQUIRE(s.ci_halfwidth_99.has_value());
  CHECK(*s.ci_halfwidth_99 ==
        doctest::Approx(kZ99 * s.rate_std / std::sqrt(1e6)).epsilon(1e-14));
  CHECK(std::abs(s.mean_rate - achievable_rate(p, kCfg).value) <= *s.ci_halfwidth_99);
  CHECK(s.n_blocks == 1000000);
  CHECK(s.seed == 2024);
}

TEST_CASE("estimation moments match the MMSE formulas") {
  const TrainingPolicy p = TrainingPolicy::from_power_fraction(kCfg, 5, 0.2);
  const SimOutcome s = simulate_blocks(p, kCfg, 400000, 77);
  const EstimationStats st = estimation_stats(p, kCfg);
  CHECK(std::abs(s.empirical_sigma_e2 - st.sigma_e2) < 3.0 * s.sigma_e2_std_error);
  CHECK(std::abs(s.empirical_sigma_hhat2 - st.sigma_hhat2) < 3.0 * s.sigma_hhat2_std_error);
  // orthogonality of estimate and error
  CHECK(std::abs(s.cross_moment) < 3.0 * s.cross_moment_std_error);
  // variance split
  const double se = std::hypot(s.sigma_e2_std_error, s.sigma_hhat2_std_error);
  CHECK(std::abs(s.empirical_sigma_e2 + s.empirical_sigma_hhat2 - 1.0) < 3.0 * se);
  // strongest estimate: H_K sigma_hhat^2
  const double expect = harmonic_number(5) * st.sigma_hhat2;
  CHECK(std::abs(s.empirical_max_hhat2_mean - expect) < 3.0 * s.max_hhat2_std_error);
  CHECK(s.empirical_sigma_e2 >= 0.0);
  CHECK(s.empirical_max_hhat2_mean >= 0.0);
}

TEST_CASE("zero data power gives zero rate") {
  PipelineParams pp = pipeline_params(TrainingPolicy::from_power_fraction(kCfg, 4, 0.3), kCfg);
  pp.data_power = 0.0;
  const SimOutcome s = simulate_pipeline(pp, 5000, 1);
  CHECK(s.mean_rate == 0.0);
  CHECK(s.rate_std == 0.0);
  CHECK(*s.ci_halfwidth_99 == 0.0);
}

TEST_CASE("a single block has no confidence interval") {
  const TrainingPolicy p = TrainingPolicy::from_power_fraction(kCfg, 5, 0.2);
  const SimOutcome s = simulate_blocks(p, kCfg, 1, 9);
  CHECK_FALSE(s.ci_halfwidth_99.has_value());
  CHECK(std::isfinite(s.mean_rate));
  CHECK(s.n_blocks == 1);
}

TEST_CASE("infeasible policies fail before sampling") {
  // alpha P_T = P leaves nothing for data
  CHECK_THROWS_AS(TrainingPolicy::from_pilot(kCfg, 5, 1, 20.0), InfeasiblePolicyError);
  CHECK_THROWS_AS(TrainingPolicy::from_power_fraction(kCfg, 5, 1.0), DomainError);
  PipelineParams pp;
  pp.alpha = 1.0;
  CHECK_THROWS_AS(simulate_pipeline(pp, 10, 1), DomainError);
  CHECK_THROWS_AS(simulate_pipeline(PipelineParams{}, 0, 1), DomainError);
}

TEST_CASE("reproducible for a fixed seed, independent of threads") {
  const TrainingPolicy p = TrainingPolicy::from_power_fraction(kCfg, 7, 0.15);
  const SimOutcome ref = simulate_blocks(p, kCfg, 50000, 5);
  CHECK(identical(ref, simulate_blocks(p, kCfg, 50000, 5)));
  CHECK_FALSE(identical(ref, simulate_blocks(p, kCfg, 50000, 6)));

  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 4}) {
    omp_set_num_threads(threads);
    CAPTURE(threads);
    CHECK(identical(ref, simulate_blocks(p, kCfg, 50000, 5, Exec::parallel)));
  }
  omp_set_num_threads(saved);

  // the block-by-block serial reference sums in another order
  const SimOutcome ser = simulate_blocks(p, kCfg, 50000, 5, Exec::serial);
  CHECK(ser.mean_rate == doctest::Approx(ref.mean_rate).epsilon(1e-12));
  CHECK(ser.rate_std == doctest::Approx(ref.rate_std).epsilon(1e-10));
  CHECK(ser.empirical_sigma_e2 == doctest::Approx(ref.empirical_sigma_e2).epsilon(1e-12));
  CHECK(ser.empirical_max_hhat2_mean == doctest::Approx(ref.empirical_max_hhat2_mean).epsilon(1e-12));
}

TEST_CASE("serial and parallel agree on a single chunk") {
  const TrainingPolicy p = TrainingPolicy::from_power_fraction(kCfg, 3, 0.25);
  const SimOutcome a = simulate_blocks(p, kCfg, kSimChunkBlocks, 11, Exec::serial);
  const SimOutcome b = simulate_blocks(p, kCfg, kSimChunkBlocks, 11, Exec::parallel);
  CHECK(a.mean_rate == doctest::Approx(b.mean_rate).epsilon(1e-13));
}

TEST_CASE("mean of the maximum of K exponentials") {
  const MeanEstimate one = empirical_max_estimate_mean(1, 1000000, 3);
  CHECK(std::abs(one.mean - 1.0) < 3.0 * one.std_error);
  const MeanEstimate three = empirical_max_estimate_mean(3, 1000000, 3);
  CHECK(std::abs(three.mean - 11.0 / 6.0) < 3.0 * three.std_error);
  const MeanEstimate thirty = empirical_max_estimate_mean(30, 10000000, 3);
  CHECK(std::abs(thirty.mean - harmonic_number(30)) < 3.0 * thirty.std_error);
  CHECK(thirty.n == 10000000);

  const int saved = omp_get_max_threads();
  omp_set_num_threads(3);
  const MeanEstimate again = empirical_max_estimate_mean(30, 100000, 3);
  omp_set_num_threads(1);
  CHECK(same_bits(again.mean, empirical_max_estimate_mean(30, 100000, 3).mean));
  omp_set_num_threads(saved);
  CHECK_THROWS_AS(empirical_max_estimate_mean(0, 10, 1), DomainError);
}

TEST_CASE("single strongest user dominates power splits") {
  const std::vector<double> equal = {0.7, 0.7};
  CHECK(single_user_scheduling_dominates(equal, 1.0, 0.02, 0.1, 1));
  const std::vector<double> one = {0.3};
  CHECK(single_user_scheduling_dominates(one, 1.0, 0.02, 0.1, 1));

  std::mt19937_64 gen(5);
  std::exponential_distribution<double> ex(1.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> g(5);
    for (double& v : g) v = ex(gen);
    CHECK(single_user_scheduling_dominates(g, 1.0, 0.03, 0.1, 100 + i));
  }
  CHECK_THROWS_AS(single_user_scheduling_dominates(std::vector<double>{}, 1.0, 0.0, 0.1, 1),
                  DomainError);
}
