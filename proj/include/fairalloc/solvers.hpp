#pragma once

#include <optional>

#include "fairalloc/instance.hpp"
#include "fairalloc/metrics.hpp"

namespace fairalloc {

struct SolveReport {
  Allocation allocation;
  double utilization = 0.0;
  ServiceProfile profile;
  // Water level tau for the water-fill, common q-level m for the fair
  // solvers (band floor for fair_band); absent for greedy and clamp_to_fair.
  std::optional<double> level;
  int iterations = 0;
  double residual = 0.0;  // |sum(allocation) - budget|
};

/// Integer-mode max utilization: allocates the budget one unit at a time,
/// each to the group with the largest survival 1 - F_i(r_i) at its current
/// allocation (ties to the lowest index). Optimal for discrete demands.
SolveReport greedy_discrete(const Instance& inst);

/// Fractional max utilization for continuous families: binary search for the
/// water level tau with sum_i F_i^{-1}(tau) = budget. Rejects discrete
/// demands (greedy covers those via the integrality property).
SolveReport waterfill_continuous(const Instance& inst);

/// Max-utilization 0-fair allocation: binary search for the common service
/// level m with sum_i q_i^{-1}(m) = budget. Works for discrete, continuous
/// and mixed demands. All-discrete instances whose budget exceeds the total
/// max support saturate every group at q = 1 and park the surplus on group 0.
SolveReport fair_exact_zero(const Instance& inst);

/// Max-utilization eps-fair allocation. eps = 0 delegates to fair_exact_zero
/// and eps = 1 to the unconstrained solver. In between, the band floor
/// m in [max(0, m0 - eps), min(m0, 1 - eps)] (m0 the 0-fair level) is scanned
/// on a 200-point grid with golden-section refinement; for fixed m each group
/// is boxed to [q_i^{-1}(m), q_i^{-1}(m + eps)] and utilization is maximized
/// by box-clamped water-filling.
SolveReport fair_band(const Instance& inst, double epsilon);

/// The 1/eps-guarantee construction: solve max utilization, clamp every
/// group with q > eps down to q = eps, then top up with the freed budget.
/// Output is eps-fair, uses the full budget and has utilization at least
/// eps times the max. Rejects eps = 0.
SolveReport clamp_to_fair(const Instance& inst, double epsilon);

/// Budget completion for an eps-fair allocation that under-uses the budget:
/// raise everyone to the max service level, then lift the common level in
/// increments of at most min(eps, 1 - level); once every group is saturated
/// at q = 1 the remainder goes to group 0. Utilization never decreases and
/// eps-fairness is preserved. Rejects inputs that are not eps-fair or
/// exceed the budget.
Allocation top_up(const Instance& inst, const Allocation& alloc,
                  double epsilon);

/// Dispatcher for the unconstrained max-utilization allocation:
/// integer mode -> greedy; all-continuous fractional -> water-fill;
/// all-discrete fractional with integer budget -> greedy (integrality);
/// remaining fractional cases -> fine-grid oracle.
SolveReport solve_max_utilization(const Instance& inst);

SolveReport make_report(const Instance& inst, Allocation alloc,
                        std::optional<double> level, int iterations);

}  // namespace fairalloc
