#pragma once

// Data-parallel kernels. Each kernel has a plain serial reference path and an
// OpenMP path; both produce identical results regardless of thread count.

#include <cstdint>
#include <vector>

namespace mudiv {

class SystemConfig;

enum class Exec { serial, parallel };

struct SweepPoint {
  std::int64_t users = 0;
  double rate = 0.0;
  double err_estimate = 0.0;
  bool feasible = true;
};

/// Achievable rate at the optimal (alpha, eps_bar) for every K in
/// [k_min, k_max], in ascending K order.
std::vector<SweepPoint> sweep_achievable_rates(const SystemConfig& config, std::int64_t k_min,
                                               std::int64_t k_max, Exec exec);

/// Index of the largest rate, smallest K on ties. Throws on an empty sweep.
std::size_t argmax_rate(const std::vector<SweepPoint>& sweep);

/// Threads used by Exec::parallel (omp_get_max_threads()).
int parallel_threads();

}  // namespace mudiv
