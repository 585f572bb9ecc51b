#include "mudiv/kernels.hpp"

#include <omp.h>

#include "mudiv/core_model.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/optimizer.hpp"
#include "mudiv/rate_eval.hpp"

namespace mudiv {

namespace {

SweepPoint evaluate_user_count(const SystemConfig& config, std::int64_t users) {
  SweepPoint p;
  p.users = users;
  try {
    const RateResult r = achievable_rate(optimal_policy(config, users), config);
    p.rate = r.value;
    p.err_estimate = r.err_estimate;
  } catch (const InfeasiblePolicyError&) {
    p.feasible = false;
  }
  return p;
}

}  // namespace

std::vector<SweepPoint> sweep_achievable_rates(const SystemConfig& config, std::int64_t k_min,
                                               std::int64_t k_max, Exec exec) {
  if (k_min < 1 || k_max > config.block_length() - 1 || k_min > k_max)
    throw DomainError("sweep_achievable_rates: need 1 <= k_min <= k_max <= L-1");
  const std::int64_t n = k_max - k_min + 1;
  std::vector<SweepPoint> out(static_cast<std::size_t>(n));

  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] = evaluate_user_count(config, k_min + i);
    return out;
  }

  // Quadrature cost varies little with K; dynamic chunks absorb the rest.
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = evaluate_user_count(config, k_min + i);
  return out;
}

std::size_t argmax_rate(const std::vector<SweepPoint>& sweep) {
  if (sweep.empty()) throw DomainError("argmax_rate: empty sweep");
  std::size_t best = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (sweep[i].rate > sweep[best].rate) best = i;
  return best;
}

int parallel_threads() { return omp_get_max_threads(); }

}  // namespace mudiv
