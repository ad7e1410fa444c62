#include "fairalloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairalloc/config.hpp"
#include "fairalloc/oracles.hpp"
#include "fairalloc/solvers.hpp"

namespace fairalloc {

namespace {

void check_aligned(const Instance& inst, const Allocation& alloc) {
  if (inst.groups.size() != alloc.amounts.size()) {
    throw std::invalid_argument("allocation is not aligned with the instance groups");
  }
}

bool all_lomax(const Instance& inst) {
  for (const auto& g : inst.groups) {
    if (!std::holds_alternative<Demand::Lomax>(g.demand.dist())) return false;
  }
  return true;
}

}  // namespace

double utilization(const Instance& inst, const Allocation& alloc) {
  check_aligned(inst, alloc);
  double total = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    total += inst.demand(i).expected_min(alloc.amounts[i]);
  }
  return total;
}

ServiceProfile service_profile(const Instance& inst, const Allocation& alloc) {
  check_aligned(inst, alloc);
  ServiceProfile profile;
  profile.q_values.reserve(inst.size());
  double lo = 1.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double q = inst.demand(i).service_prob(alloc.amounts[i]);
    profile.q_values.push_back(q);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  profile.gap = inst.size() <= 1 ? 0.0 : hi - lo;
  return profile;
}

double bound_inverse_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw std::invalid_argument("bound_inverse_epsilon: epsilon must lie in (0, 1]");
  }
  return 1.0 / epsilon;
}

double bound_powerlaw(int n_groups) {
  if (n_groups < 1) {
    throw std::invalid_argument("bound_powerlaw: need at least one group");
  }
  double harmonic = 0.0;
  for (int k = 1; k <= n_groups; ++k) harmonic += 1.0 / k;
  return n_groups * harmonic;
}

bool scaled_family_check(const Instance& inst, int grid_points) {
  inst.validate();
  if (grid_points < 1) {
    throw std::invalid_argument("scaled_family_check: grid_points must be >= 1");
  }
  if (!inst.all_continuous()) {
    throw std::invalid_argument("scaled_family_check: continuous families only");
  }
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::size_t j = 0; j < inst.size(); ++j) {
      if (i == j) continue;
      const Demand& di = inst.demand(i);
      const Demand& dj = inst.demand(j);
      const double ratio = dj.mean() / di.mean();
      for (int k = 1; k <= grid_points; ++k) {
        const double tau = static_cast<double>(k) / (grid_points + 1);
        const double r = di.quantile(tau);
        if (std::abs(di.cdf(r) - dj.cdf(r * ratio)) > 1e-9) return false;
      }
    }
  }
  return true;
}

PofReport price_of_fairness(const Instance& inst, double epsilon) {
  inst.validate();
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("price_of_fairness: epsilon must lie in [0, 1]");
  }
  PofReport report;
  report.epsilon = epsilon;

  if (inst.mode == AllocationMode::kInteger) {
    report.u_max = greedy_discrete(inst).utilization;
    const OracleResult fair = exhaustive_discrete_fair(inst, epsilon);
    report.u_fair = fair.feasible ? fair.best_value : 0.0;
  } else {
    report.u_max = solve_max_utilization(inst).utilization;
    report.u_fair = fair_band(inst, epsilon).utilization;
    // The fair allocation is itself feasible for the unconstrained problem,
    // so its utilization is a second lower bound on the max. Grid-delegated
    // mixed instances need it: the lattice optimum can sit a Lipschitz slack
    // below the exact band solve.
    report.u_max = std::max(report.u_max, report.u_fair);
  }

  if (report.u_fair > 0.0) {
    report.pof = report.u_max / report.u_fair;
  } else if (report.u_max > 0.0) {
    report.pof = std::numeric_limits<double>::infinity();
    report.pof_infinite = true;
  } else {
    report.pof = 1.0;  // 0/0: an empty-budget instance has no fairness price
  }

  if (inst.mode == AllocationMode::kFractional && epsilon > 0.0) {
    report.bound_inverse_eps = bound_inverse_epsilon(epsilon);
  }
  if (all_lomax(inst)) {
    report.bound_powerlaw = bound_powerlaw(static_cast<int>(inst.size()));
  }
  report.bound_satisfied = true;
  if (report.bound_inverse_eps &&
      !(report.pof <= *report.bound_inverse_eps + 1e-6)) {
    report.bound_satisfied = false;
  }
  if (report.bound_powerlaw && !(report.pof <= *report.bound_powerlaw + 1e-6)) {
    report.bound_satisfied = false;
  }
  return report;
}

}  // namespace fairalloc
