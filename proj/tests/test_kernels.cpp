#include <omp.h>

#include <cstring>

#include "doctest.h"
#include "mudiv/core_model.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/kernels.hpp"
#include "mudiv/optimizer.hpp"

using namespace mudiv;

namespace {
bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool identical(const std::vector<SweepPoint>& a, const std::vector<SweepPoint>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].users != b[i].users || !same_bits(a[i].rate, b[i].rate) ||
        !same_bits(a[i].err_estimate, b[i].err_estimate) || a[i].feasible != b[i].feasible)
      return false;
  return true;
}
}  // namespace

TEST_CASE("parallel sweep equals the serial reference bit for bit") {
  const SystemConfig cfg(1.0, 1.0, 0.1, 3000);
  const auto serial = sweep_achievable_rates(cfg, 1, 2999, Exec::serial);
  REQUIRE(serial.size() == 2999);
  for (std::int64_t i = 0; i < 2999; ++i) CHECK(serial[i].users == i + 1);

  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 4, 8}) {
    omp_set_num_threads(threads);
    CAPTURE(threads);
    CHECK(identical(serial, sweep_achievable_rates(cfg, 1, 2999, Exec::parallel)));
  }
  omp_set_num_threads(saved);
}

TEST_CASE("sub-range sweeps") {
  const SystemConfig cfg(1.0, 1.0, 0.1, 250);
  const auto full = sweep_achievable_rates(cfg, 1, 249, Exec::serial);
  const auto part = sweep_achievable_rates(cfg, 10, 20, Exec::parallel);
  REQUIRE(part.size() == 11);
  for (std::size_t i = 0; i < part.size(); ++i) CHECK(same_bits(part[i].rate, full[9 + i].rate));
  CHECK_THROWS_AS(sweep_achievable_rates(cfg, 0, 10, Exec::serial), DomainError);
  CHECK_THROWS_AS(sweep_achievable_rates(cfg, 5, 250, Exec::serial), DomainError);
  CHECK_THROWS_AS(sweep_achievable_rates(cfg, 6, 5, Exec::serial), DomainError);
}

TEST_CASE("argmax_rate takes the smallest K on ties") {
  std::vector<SweepPoint> s = {{1, 1.0, 0, true}, {2, 3.0, 0, true}, {3, 3.0, 0, true},
                               {4, 2.0, 0, true}};
  CHECK(argmax_rate(s) == 1);
  s[0].rate = 3.0;
  CHECK(argmax_rate(s) == 0);
  CHECK_THROWS_AS(argmax_rate({}), DomainError);
}

TEST_CASE("optimal_user_count does not depend on Exec or thread count") {
  const SystemConfig cfg(1.0, 1.0, 0.1, 5000);
  const OptimizationReport ref = optimal_user_count(cfg, Exec::serial);
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    const OptimizationReport par = optimal_user_count(cfg, Exec::parallel);
    CHECK(par.k_star == ref.k_star);
    CHECK(same_bits(par.rate.value, ref.rate.value));
    CHECK(identical(par.sweep, ref.sweep));
  }
  omp_set_num_threads(saved);
  CHECK(parallel_threads() >= 1);
}
