#pragma once

#include <cstddef>
#include <cstdint>

namespace bba {

/// Surrogate-fit telemetry collected across one attack instance.
struct AttackStats {
  int fit_calls = 0;
  std::uint64_t fit_time_ns = 0;
  std::size_t max_block_fit_points = 0;  // largest per-block fit dataset
  bool block_fit_bound_ok = true;        // every block fit used <= 2*N_k points
  std::size_t max_refit_points = 0;      // largest importance-refit dataset
};

}  // namespace bba
