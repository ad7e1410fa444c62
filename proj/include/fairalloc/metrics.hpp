#pragma once

#include <optional>
#include <vector>

#include "fairalloc/instance.hpp"

namespace fairalloc {

// Per-group service probabilities plus the fairness gap
// Q = max_i q_i - min_i q_i (equal to the max pairwise difference).
struct ServiceProfile {
  std::vector<double> q_values;
  double gap = 0.0;
};

// Price-of-Fairness summary for one instance and fairness level.
struct PofReport {
  double u_max = 0.0;
  double u_fair = 0.0;
  double pof = 1.0;  // +inf when u_fair == 0 < u_max (see pof_infinite)
  bool pof_infinite = false;
  double epsilon = 0.0;
  std::optional<double> bound_inverse_eps;  // 1/eps; fractional mode, eps > 0
  std::optional<double> bound_powerlaw;     // n*H_n; all demands Lomax
  bool bound_satisfied = true;
};

/// Sum over groups of E[min(X_i, r_i)].
double utilization(const Instance& inst, const Allocation& alloc);

ServiceProfile service_profile(const Instance& inst, const Allocation& alloc);

/// 1/epsilon; rejects epsilon == 0 (no such bound exists there).
double bound_inverse_epsilon(double epsilon);

/// n * H_n with H_n the n-th harmonic number; rejects n == 0.
double bound_powerlaw(int n_groups);

/// True iff the groups' CDFs are mean-scaled copies of one another:
/// |F_i(r) - F_j(r * mean_j / mean_i)| <= 1e-9 on a quantile-spaced grid of
/// grid_points points, for every ordered pair. Continuous families only.
/// True predicts PoF(eps=0) = 1.
bool scaled_family_check(const Instance& inst, int grid_points);

/// Unconstrained max utilization over eps-fair max utilization, with the
/// applicable theoretical bounds filled in. u_max comes from greedy
/// (integer mode), the water-fill (all-continuous fractional), greedy via the
/// integrality property (all-discrete fractional with integer budget) or the
/// grid oracle (remaining fractional cases); u_fair from the exhaustive
/// oracle (integer mode; desk scale) or fair_band (fractional).
PofReport price_of_fairness(const Instance& inst, double epsilon);

}  // namespace fairalloc
