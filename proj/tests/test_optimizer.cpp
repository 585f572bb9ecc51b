#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mudiv/asymptotics.hpp"
#include "mudiv/core_model.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/optimizer.hpp"
#include "mudiv/rate_eval.hpp"

using namespace mudiv;

namespace {

// x(eps) through the MMSE chain with P = 1, sigma_z2 = 1, sigma_h2 = S.
double x_chain(double alpha, double eps, double snr) {
  const double pt = eps / alpha;
  const double se2 = snr / (snr * pt + 1.0);
  const double pd = (1.0 - eps) / (1.0 - alpha);
  return (pd * se2 + 1.0) / (pd * (snr - se2));
}

// Grid search, then bisection on the sign of a central difference.
double argmin_x(double alpha, double snr, int grid) {
  double best = 0.5, best_x = INFINITY;
  for (int i = 1; i < grid; ++i) {
    const double e = static_cast<double>(i) / grid;
    const double v = x_chain(alpha, e, snr);
    if (v < best_x) best_x = v, best = e;
  }
  double lo = std::max(best - 1.0 / grid, 1e-15), hi = std::min(best + 1.0 / grid, 1 - 1e-15);
  auto slope = [&](double e) {
    const double h = 1e-7 * std::min(e, 1.0 - e);
    return x_chain(alpha, e + h, snr) - x_chain(alpha, e - h, snr);
  };
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double a2_formula(double k, double L, double s) {
  const double inner = 1.0 + s * (1.0 - 2.0 * std::sqrt((s + 1.0) / s) * std::sqrt(k / L)) *
                                 std::log(k);
  return inner > 0.0 ? (1.0 - k / L) * std::log(inner) : -INFINITY;
}

}  // namespace

TEST_CASE("optimal_alpha") {
  CHECK(optimal_alpha(14, 250) == doctest::Approx(0.056).epsilon(1e-15));
  CHECK(optimal_alpha(1, 2) == 0.5);
  CHECK_THROWS_AS(optimal_alpha(0, 250), DomainError);
  CHECK_THROWS_AS(optimal_alpha(250, 250), DomainError);
}

TEST_CASE("one pilot symbol per user beats longer training at equal energy fraction") {
  const SystemConfig cfg(1.0, 1.0, 0.1, 250);
  for (std::int64_t k : {5, 14, 30}) {
    for (double eps : {0.1, 0.2, 0.4}) {
      const double base = achievable_rate(TrainingPolicy::from_power_fraction(cfg, k, eps), cfg)
                              .value;
      for (std::int64_t t : {2, 3, 4}) {
        const double alpha = static_cast<double>(k * t) / 250.0;
        const TrainingPolicy longer = TrainingPolicy::from_pilot(cfg, k, t, eps / alpha);
        CAPTURE(k);
        CAPTURE(eps);
        CAPTURE(t);
        CHECK(longer.eps_bar() == doctest::Approx(eps));
        CHECK(base > achievable_rate(longer, cfg).value);
      }
    }
  }
}

TEST_CASE("optimal_eps_bar special cases") {
  for (double s : {0.1, 1.0, 10.0, 1000.0}) CHECK(optimal_eps_bar(0.5, s) == 0.5);
  // continuous through the alpha = 1/2 branch
  CHECK(optimal_eps_bar(0.5 + 1e-10, 10.0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(optimal_eps_bar(0.5 - 1e-7, 10.0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(optimal_eps_bar(0.0, 10.0), DomainError);
  CHECK_THROWS_AS(optimal_eps_bar(1.0, 10.0), DomainError);
  CHECK_THROWS_AS(optimal_eps_bar(0.3, 0.0), DomainError);
}

TEST_CASE("optimal_eps_bar matches the numerical argmin of x") {
  CHECK(std::abs(optimal_eps_bar(0.056, 10.0) - argmin_x(0.056, 10.0, 100000)) < 1e-6);

  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double alpha = std::exp(std::log(1e-4) + u(gen) * (std::log(0.9) - std::log(1e-4)));
    const double s = std::exp(std::log(0.1) + u(gen) * (std::log(100.0) - std::log(0.1)));
    const double e = optimal_eps_bar(alpha, s);
    CAPTURE(alpha);
    CAPTURE(s);
    CHECK(e > 0.0);
    CHECK(e < 1.0);
    CHECK(std::abs(eps_bar_quadratic_residual(alpha, s, e)) < 1e-9);
    CHECK(std::abs(e - argmin_x(alpha, s, 20000)) < 1e-6);
  }
}

TEST_CASE("optimal_eps_bar is a global minimum of x") {
  for (double alpha : {0.004, 0.056, 0.3, 0.5, 0.8}) {
    const double e = optimal_eps_bar(alpha, 10.0);
    const double xs = effective_inverse_snr(alpha, e, 10.0);
    for (int i = 1; i < 1000; ++i)
      CHECK(xs <= effective_inverse_snr(alpha, i / 1000.0, 10.0) * (1 + 1e-14));
  }
}

TEST_CASE("optimal_eps_bar tracks sqrt((S+1)/S alpha) as alpha -> 0") {
  double prev = INFINITY;
  for (double alpha : {1e-2, 1e-3, 1e-4}) {
    const double lead = std::sqrt(1.1 * alpha);
    const double rel = std::abs(optimal_eps_bar(alpha, 10.0) - lead) / lead;
    CHECK(rel < prev);
    prev = rel;
  }
}

TEST_CASE("eps_bar_quadratic") {
  const double e = optimal_eps_bar(0.1, 10.0);
  CHECK(std::abs(eps_bar_quadratic(0.1, 10.0, e)) < 1e-12);
  // literal left side
  const double a = 0.2, s = 3.0, x = 0.4;
  CHECK(eps_bar_quadratic(a, s, x) ==
        doctest::Approx(s * (1 - 2 * a) * x * x + (2 * a * (s + 1) - 2 * a * a) * x + a * a -
                        a * (s + 1)));
}

TEST_CASE("eps_bar_derivative_numerator") {
  for (double alpha : {0.01, 0.1, 0.45, 0.7}) {
    const double e = optimal_eps_bar(alpha, 10.0);
    CHECK(std::abs(eps_bar_derivative_numerator(alpha, 10.0, e)) < 1e-9);
  }
  CHECK(eps_bar_derivative_numerator(0.1, 10.0, 0.001) < 0.0);
  CHECK(eps_bar_derivative_numerator(0.1, 10.0, 0.999) > 0.0);
  // sign agrees with finite differences of x
  for (double e : {0.001, 0.999}) {
    const double h = 1e-6;
    const double fd = effective_inverse_snr(0.1, e + h, 10.0) - effective_inverse_snr(0.1, e - h, 10.0);
    CHECK((fd > 0) == (eps_bar_derivative_numerator(0.1, 10.0, e) > 0));
  }
  // exactly one sign change on (0,1)
  for (double alpha : {0.02, 0.2, 0.6}) {
    int changes = 0;
    double prev = eps_bar_derivative_numerator(alpha, 10.0, 1e-4);
    for (int i = 2; i < 10000; ++i) {
      const double cur = eps_bar_derivative_numerator(alpha, 10.0, i * 1e-4);
      if ((cur > 0) != (prev > 0)) ++changes;
      prev = cur;
    }
    CHECK(changes == 1);
  }
  CHECK_THROWS_AS(eps_bar_derivative_numerator(0.1, 10.0, 0.0), DomainError);
}

TEST_CASE("optimal_policy") {
  const SystemConfig cfg(1.0, 1.0, 0.1, 250);
  const TrainingPolicy p = optimal_policy(cfg, 14);
  CHECK(p.alpha() == doctest::Approx(0.056));
  CHECK(p.pilot_length() == 1);
  CHECK(p.eps_bar() == doctest::Approx(optimal_eps_bar(0.056, 10.0)).epsilon(1e-15));
  CHECK(p.pilot_power() == doctest::Approx(p.eps_bar() / 0.056));
}

TEST_CASE("exhaustive search at the reference configuration") {
  const SystemConfig cfg(1.0, 1.0, 0.1, 250);
  const OptimizationReport rep = optimal_user_count(cfg);
  // The quadrature and the 50-digit series agree to 12 digits here:
  // C(13) = 2.891412241307 > C(14) = 2.891251541080.
  CHECK(rep.k_star == 13);
  CHECK(rep.rate.value == doctest::Approx(2.891412241307).epsilon(1e-11));
  CHECK(rep.sweep.size() == 249);
  CHECK(std::abs(rep.quadratic_residual) < 1e-9);
  for (const SweepPoint& s : rep.sweep) CHECK(s.rate <= rep.rate.value);
  const double r13 = (1 - 13 / 250.0) * expected_log_max_series(13, effective_inverse_snr(optimal_policy(cfg, 13), cfg));
  const double r14 = (1 - 14 / 250.0) * expected_log_max_series(14, effective_inverse_snr(optimal_policy(cfg, 14), cfg));
  CHECK(r13 > r14);
}

TEST_CASE("exhaustive search edge cases") {
  CHECK(optimal_user_count(SystemConfig(1.0, 1.0, 0.1, 2)).k_star == 1);
  const SystemConfig cfg(1.0, 1.0, 0.1, 250);
  const OptimizationReport capped = optimal_user_count(cfg, Exec::serial, 10);
  CHECK(capped.sweep.size() == 10);
  CHECK(capped.k_star == 10);
  CHECK_THROWS_AS(optimal_user_count(cfg, Exec::serial, 250), DomainError);
}

TEST_CASE("exhaustive search equals an independent brute-force loop at L=1000") {
  const SystemConfig cfg(1.0, 1.0, 0.1, 1000);
  std::int64_t best_k = 0;
  double best = -1.0;
  for (std::int64_t k = 1; k < 1000; ++k) {
    const double alpha = k / 1000.0;
    const double e = optimal_eps_bar(alpha, 10.0);
    const double v = (1.0 - alpha) * expected_log_max(k, x_chain(alpha, e, 10.0)).value;
    if (v > best) best = v, best_k = k;
  }
  const OptimizationReport rep = optimal_user_count(cfg);
  CHECK(rep.k_star == best_k);
  CHECK(rep.k_star == 34);
  CHECK(rep.rate.value == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("K* is invariant when sigma_h2 and sigma_z2 scale together") {
  const OptimizationReport a = optimal_user_count(SystemConfig(1.0, 1.0, 0.1, 400));
  const OptimizationReport b = optimal_user_count(SystemConfig(1.0, 7.0, 0.7, 400));
  CHECK(a.k_star == b.k_star);
  CHECK(a.policy.eps_bar() == doctest::Approx(b.policy.eps_bar()).epsilon(1e-14));
  CHECK(a.rate.value == doctest::Approx(b.rate.value).epsilon(1e-12));
}

TEST_CASE("approx_user_count") {
  const SystemConfig cfg(1.0, 1.0, 0.1, 250);
  const std::int64_t ka = approx_user_count(cfg);
  CHECK(ka == 9);
  // The maximizer sits further from K* than a +-3 band at this short block
  // length, but the rate it delivers is within 1% of the optimum.
  const double loss = achievable_rate(optimal_policy(cfg, ka), cfg).value /
                      optimal_user_count(cfg).rate.value;
  CHECK(loss > 0.99);
  CHECK(loss < 1.0);
  CHECK_THROWS_AS(approx_user_count(2, 10.0), DomainError);
}

TEST_CASE("approx_user_count matches a dense grid of the formula at L=1e5") {
  const double L = 1e5;
  std::int64_t best_k = 0;
  double best = -INFINITY;
  for (std::int64_t k = 2; k < 100000; ++k) {
    const double v = a2_formula(static_cast<double>(k), L, 10.0);
    if (v > best) best = v, best_k = k;
  }
  CHECK(approx_user_count(100000, 10.0) == best_k);
}

TEST_CASE("stationarity condition around the approximate maximizer") {
  const std::int64_t k4 = approx_user_count(10000, 10.0);
  CHECK(approx_rate_a2(k4, 1e4, 10.0) > approx_rate_a2(k4 - 1, 1e4, 10.0));
  CHECK(approx_rate_a2(k4, 1e4, 10.0) >= approx_rate_a2(k4 + 1, 1e4, 10.0));
  CHECK(stationarity_residual(k4 - 1, 1e4, 10.0) > 0.0);
  CHECK(stationarity_residual(k4 + 1, 1e4, 10.0) < 0.0);

  const std::int64_t k5 = approx_user_count(100000, 10.0);
  const double r = std::abs(stationarity_residual(k5, 1e5, 10.0));
  CHECK(r < std::abs(stationarity_residual(0.5 * k5, 1e5, 10.0)));
  CHECK(r < std::abs(stationarity_residual(2.0 * k5, 1e5, 10.0)));

  // golden-section maximizer of the continuous formula
  double lo = 2.0, hi = 5000.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (a2_formula(m1, 1e5, 10.0) < a2_formula(m2, 1e5, 10.0))
      lo = m1;
    else
      hi = m2;
  }
  const double kc = 0.5 * (lo + hi);
  CHECK(stationarity_residual(kc * 0.999, 1e5, 10.0) > 0.0);
  CHECK(stationarity_residual(kc * 1.001, 1e5, 10.0) < 0.0);
  CHECK(std::abs(kc - static_cast<double>(k5)) < 1.0);
}

TEST_CASE("stationarity residual is negative deep in the large-K regime") {
  CHECK(stationarity_residual(1e5, 1e6, 10.0) < 0.0);
  CHECK(stationarity_residual(2e4, 1e5, 10.0) < 0.0);
  CHECK_THROWS_AS(stationarity_residual(200.0, 250.0, 10.0), DomainError);
}

TEST_CASE("implicit relation for the approximate maximizer tightens with L") {
  // L / implicit_L_of_K(K_a*) moves toward 1 as L grows; at L = 1e5 the
  // two-term truncation still undershoots by about 40%.
  double prev = INFINITY;
  for (std::int64_t L : {1000, 10000, 100000, 1000000}) {
    const double ratio = implicit_L_of_K(approx_user_count(L, 10.0), 10.0) / L;
    CAPTURE(L);
    CAPTURE(ratio);
    CHECK(std::abs(1.0 - ratio) < prev);
    prev = std::abs(1.0 - ratio);
  }
}
