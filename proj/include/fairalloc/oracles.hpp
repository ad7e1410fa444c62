#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fairalloc/instance.hpp"

namespace fairalloc {

// Thrown when an enumeration would exceed the 1e7-candidate guard.
class OracleSizeError : public std::runtime_error {
 public:
  explicit OracleSizeError(const std::string& what) : std::runtime_error(what) {}
};

enum class OracleMode { kExhaustiveInteger, kGridFractional, kMonteCarlo };

struct OracleResult {
  Allocation best_allocation;
  double best_value = 0.0;
  std::int64_t evaluated = 0;
  OracleMode mode = OracleMode::kExhaustiveInteger;
  // exhaustive_discrete_fair only: false when no allocation meets the
  // fairness filter (best_allocation is then empty and best_value 0).
  bool feasible = true;
};

/// Enumerates every integer allocation summing to the budget and returns the
/// utilization maximum; ties go to the lexicographically least allocation.
/// Guard: C(B+n-1, n-1) <= 1e7.
OracleResult exhaustive_discrete_max(const Instance& inst);

/// Max utilization over integer allocations using at most the budget, with
/// fairness gap <= epsilon + 1e-12. The relaxation to partial budget use is
/// what makes the fairness constraint satisfiable on adversarial instances
/// where no full-budget allocation is epsilon-fair.
OracleResult exhaustive_discrete_fair(const Instance& inst, double epsilon);

/// Searches the simplex grid with the given spacing (first n-1 coordinates
/// on the lattice, the last absorbs the remainder). With epsilon present,
/// filters by gap <= epsilon + 1e-9. Guard: (B/step + 1)^(n-1) <= 1e7.
OracleResult grid_fractional(const Instance& inst,
                             std::optional<double> epsilon, double step);

struct MonteCarloResult {
  double util_estimate = 0.0;
  double util_stderr = 0.0;
  std::vector<double> q_estimates;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
};

/// Simulates `reps` independent demand draws (inverse-CDF sampling from
/// counter-based per-(replicate, group) substreams). A fractional amount r
/// over a discrete demand is realized as ceil(r) with probability frac(r),
/// floor(r) otherwise. Results are bit-identical for a given seed at any
/// thread count (fixed-size replicate blocks, reduced in block order);
/// threads = 0 picks a hardware-based count.
MonteCarloResult monte_carlo(const Instance& inst, const Allocation& alloc,
                             std::int64_t reps, std::uint64_t seed,
                             int threads = 0);

}  // namespace fairalloc
