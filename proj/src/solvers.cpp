#include "fairalloc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fairalloc/config.hpp"
#include "fairalloc/numeric.hpp"
#include "fairalloc/oracles.hpp"

namespace fairalloc {

namespace {

double residual_tol(double budget) {
  return tolerances().residual_factor * std::max(1.0, budget);
}

// Allocation of one group at CDF level tau = 1 - exp(-u). The u coordinate
// keeps levels within an ulp of 1 representable, which direct tau bisection
// cannot do for large budgets.
double alloc_at_cdf_u(const Demand& d, double u) {
  if (u <= 0.0) return 0.0;
  return d.quantile_by_survival(std::max(std::exp(-u), 1e-300));
}

// Allocation of one group at service level m = 1 - exp(-v).
double alloc_at_fair_v(const Demand& d, double v) {
  if (v <= 0.0) return 0.0;
  return d.inverse_service_by_survival(std::max(std::exp(-v), 1e-300));
}

struct LevelOutcome {
  double param = 0.0;  // transformed level on the sum >= budget side
  int iterations = 0;
  bool bracketed = true;
};

// Finds param with sum_at(param) == budget for a nondecreasing sum_at,
// by doubling then bisecting to bracket collapse.
template <class SumFn>
LevelOutcome solve_level_param(SumFn sum_at, double budget) {
  LevelOutcome out;
  if (budget <= 0.0) return out;
  const int cap = tolerances().max_bisect_iterations;
  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (sum_at(hi) < budget) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > cap) {
      out.param = hi;
      out.iterations = doublings;
      out.bracketed = false;
      return out;
    }
  }
  const auto res = numeric::bisect_nondecreasing(sum_at, budget, lo, hi, 0.0,
                                                 1e-13, cap);
  out.param = res.hi;
  out.iterations = doublings + res.iterations;
  return out;
}

// All groups saturated at q = 1, surplus parked on group 0. Only reachable
// for all-discrete instances whose budget covers the total max support.
SolveReport saturated_report(const Instance& inst) {
  Allocation alloc;
  alloc.amounts.reserve(inst.size());
  for (const auto& g : inst.groups) {
    alloc.amounts.push_back(g.demand.max_support());
  }
  alloc.amounts[0] += inst.budget - alloc.total();
  SolveReport report = make_report(inst, std::move(alloc), 1.0, 0);
  return report;
}

struct BandSolve {
  std::vector<double> alloc;
  double util = 0.0;
  double residual = 0.0;
};

// Maximizes sum_i E[min(X_i, r_i)] subject to sum r_i = budget and
// lo_i <= r_i <= hi_i, assuming sum lo <= budget <= sum hi (up to dust).
// Utilization is separable concave, so a common marginal value theta with
// r_i = clamp(S_i^{-1}(theta), lo_i, hi_i) is optimal; theta is bisected and
// any plateau slack (discrete demands have step marginals) is filled in
// index order between the two final brackets.
BandSolve box_waterfill(const Instance& inst, const std::vector<double>& lo,
                        const std::vector<double>& hi, double budget) {
  const std::size_t n = inst.size();
  auto alloc_at_theta = [&](double theta, std::vector<double>& out) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = inst.demand(i).quantile_by_survival(theta);
      out[i] = std::clamp(z, lo[i], hi[i]);
      sum += out[i];
    }
    return sum;
  };

  std::vector<double> scratch(n);
  double th_lo = 0.0;  // sum there is sum(hi) >= budget
  double th_hi = 1.0;  // sum there is sum(lo) <= budget
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (th_lo + th_hi);
    if (mid <= th_lo || mid >= th_hi) break;
    if (alloc_at_theta(mid, scratch) >= budget) {
      th_lo = mid;
    } else {
      th_hi = mid;
    }
  }

  BandSolve out;
  out.alloc.resize(n);
  std::vector<double> caps(n);
  double base_sum = alloc_at_theta(th_hi, out.alloc);
  if (th_hi >= 1.0) {  // budget == sum(lo): never bisected
    for (std::size_t i = 0; i < n; ++i) out.alloc[i] = lo[i];
    base_sum = 0.0;
    for (double v : out.alloc) base_sum += v;
  }
  if (th_lo <= 0.0) {
    caps = hi;
  } else {
    alloc_at_theta(th_lo, caps);
  }
  double deficit = budget - base_sum;
  for (std::size_t i = 0; i < n && deficit > 0.0; ++i) {
    const double add = std::min(deficit, std::max(0.0, caps[i] - out.alloc[i]));
    out.alloc[i] += add;
    deficit -= add;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += out.alloc[i];
    out.util += inst.demand(i).expected_min(out.alloc[i]);
  }
  out.residual = std::abs(total - budget);
  return out;
}

// Band subproblem of fair_band: all service levels boxed to [m, m + eps].
BandSolve band_solve_at_floor(const Instance& inst, double m, double eps) {
  const std::size_t n = inst.size();
  std::vector<double> lo(n);
  std::vector<double> hi(n);
  const double ceiling_s = std::max(1.0 - m - eps, 1e-12);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = m <= 0.0 ? 0.0 : inst.demand(i).inverse_service_prob(std::min(m, 1.0 - 1e-12));
    hi[i] = inst.demand(i).inverse_service_by_survival(ceiling_s);
  }
  return box_waterfill(inst, lo, hi, inst.budget);
}

}  // namespace

SolveReport make_report(const Instance& inst, Allocation alloc,
                        std::optional<double> level, int iterations) {
  SolveReport report;
  report.utilization = utilization(inst, alloc);
  report.profile = service_profile(inst, alloc);
  report.residual = std::abs(alloc.total() - inst.budget);
  report.allocation = std::move(alloc);
  report.level = level;
  report.iterations = iterations;
  return report;
}

SolveReport greedy_discrete(const Instance& inst) {
  inst.validate();
  if (inst.mode != AllocationMode::kInteger) {
    throw std::invalid_argument("greedy_discrete: integer allocation mode required");
  }
  const std::size_t n = inst.size();
  Allocation alloc;
  alloc.amounts.assign(n, 0.0);
  std::vector<double> tail(n);
  for (std::size_t i = 0; i < n; ++i) tail[i] = inst.demand(i).survival(0.0);
  const auto units = static_cast<std::int64_t>(inst.budget);
  for (std::int64_t unit = 0; unit < units; ++unit) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (tail[i] > tail[best]) best = i;  // ties keep the lowest index
    }
    alloc.amounts[best] += 1.0;
    tail[best] = inst.demand(best).survival(alloc.amounts[best]);
  }
  return make_report(inst, std::move(alloc), std::nullopt,
                     static_cast<int>(units));
}

SolveReport waterfill_continuous(const Instance& inst) {
  inst.validate();
  if (inst.mode != AllocationMode::kFractional) {
    throw std::invalid_argument("waterfill_continuous: fractional mode required");
  }
  if (!inst.all_continuous()) {
    throw std::invalid_argument(
        "waterfill_continuous: discrete demands rejected, use greedy_discrete");
  }
  const std::size_t n = inst.size();
  auto sum_at = [&](double u) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += alloc_at_cdf_u(inst.demand(i), u);
    return sum;
  };
  const LevelOutcome level = solve_level_param(sum_at, inst.budget);
  Allocation alloc;
  alloc.amounts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    alloc.amounts.push_back(alloc_at_cdf_u(inst.demand(i), level.param));
  }
  const double tau = -std::expm1(-level.param);
  return make_report(inst, std::move(alloc), tau, level.iterations);
}

SolveReport fair_exact_zero(const Instance& inst) {
  inst.validate();
  if (inst.mode != AllocationMode::kFractional) {
    throw std::invalid_argument("fair_exact_zero: fractional mode required");
  }
  const std::size_t n = inst.size();
  if (inst.all_discrete() &&
      inst.budget >= inst.total_max_support() - residual_tol(inst.budget)) {
    return saturated_report(inst);
  }
  auto sum_at = [&](double v) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += alloc_at_fair_v(inst.demand(i), v);
    return sum;
  };
  const LevelOutcome level = solve_level_param(sum_at, inst.budget);
  Allocation alloc;
  alloc.amounts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    alloc.amounts.push_back(alloc_at_fair_v(inst.demand(i), level.param));
  }
  const double m = -std::expm1(-level.param);
  return make_report(inst, std::move(alloc), m, level.iterations);
}

SolveReport solve_max_utilization(const Instance& inst) {
  inst.validate();
  if (inst.mode == AllocationMode::kInteger) {
    return greedy_discrete(inst);
  }
  if (inst.all_continuous()) {
    return waterfill_continuous(inst);
  }
  if (inst.all_discrete() && inst.budget == std::floor(inst.budget)) {
    // The fractional optimum over discrete demands is integer-valued, so the
    // greedy integer solve is exact here.
    SolveReport report = greedy_discrete(inst.with_mode(AllocationMode::kInteger));
    return report;
  }
  // Mixed demands (or a fractional budget over discrete demands): fine-grid
  // oracle, coarsened only as far as the enumeration guard requires.
  double step = 1e-3;
  const double dims = static_cast<double>(inst.size()) - 1.0;
  while (std::pow(inst.budget / step + 1.0, dims) > 1e7) step *= 2.0;
  const OracleResult grid = grid_fractional(inst, std::nullopt, step);
  return make_report(inst, grid.best_allocation, std::nullopt, 0);
}

SolveReport fair_band(const Instance& inst, double epsilon) {
  inst.validate();
  if (inst.mode != AllocationMode::kFractional) {
    throw std::invalid_argument("fair_band: fractional mode required");
  }
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("fair_band: epsilon must lie in [0, 1]");
  }
  if (epsilon < 1e-15) {
    return fair_exact_zero(inst);
  }
  if (epsilon >= 1.0 - 1e-15) {
    return solve_max_utilization(inst);
  }
  if (inst.all_discrete() &&
      inst.budget >= inst.total_max_support() - residual_tol(inst.budget)) {
    return saturated_report(inst);
  }
  if (inst.budget <= 0.0) {
    Allocation zeros;
    zeros.amounts.assign(inst.size(), 0.0);
    return make_report(inst, std::move(zeros), 0.0, 0);
  }

  const SolveReport zero_fair = fair_exact_zero(inst);
  const double m0 = zero_fair.level.value();
  const double m_lo = std::max(0.0, m0 - epsilon);
  const double m_hi = std::min(m0, 1.0 - epsilon);

  double best_m = m0;
  BandSolve best;
  best.util = -1.0;
  int evals = 0;
  const double rtol = residual_tol(inst.budget);
  auto consider = [&](double m) {
    const BandSolve cand = band_solve_at_floor(inst, m, epsilon);
    ++evals;
    const bool cand_ok = cand.residual <= rtol;
    const bool best_ok = best.residual <= rtol && best.util >= 0.0;
    if ((cand_ok && !best_ok) ||
        (cand_ok == best_ok && cand.util > best.util)) {
      best = cand;
      best_m = m;
    }
    return cand.util;
  };

  if (m_hi <= m_lo) {
    consider(std::clamp(m0, 0.0, 1.0 - epsilon));
  } else {
    constexpr int kGrid = 200;
    int best_j = 0;
    double best_grid = -1.0;
    for (int j = 0; j <= kGrid; ++j) {
      const double m = m_lo + (m_hi - m_lo) * j / kGrid;
      const double value = consider(m);
      if (value > best_grid) {
        best_grid = value;
        best_j = j;
      }
    }
    // Golden-section refinement on the bracket around the best grid point.
    double a = m_lo + (m_hi - m_lo) * std::max(0, best_j - 1) / kGrid;
    double b = m_lo + (m_hi - m_lo) * std::min(kGrid, best_j + 1) / kGrid;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = consider(x1);
    double f2 = consider(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = consider(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = consider(x1);
      }
    }
  }

  Allocation alloc;
  alloc.amounts = best.alloc;
  return make_report(inst, std::move(alloc), best_m, evals);
}

SolveReport clamp_to_fair(const Instance& inst, double epsilon) {
  inst.validate();
  if (inst.mode != AllocationMode::kFractional) {
    throw std::invalid_argument("clamp_to_fair: fractional mode required");
  }
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw std::invalid_argument("clamp_to_fair: epsilon must lie in (0, 1]");
  }
  SolveReport base = solve_max_utilization(inst);
  if (base.profile.gap <= epsilon) {
    return base;  // already epsilon-fair, PoF = 1 here
  }
  bool any_clamped = false;
  Allocation clamped = base.allocation;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (base.profile.q_values[i] > epsilon) {
      clamped.amounts[i] = inst.demand(i).inverse_service_prob(epsilon);
      any_clamped = true;
    }
  }
  if (!any_clamped) {
    return base;
  }
  Allocation full = top_up(inst, clamped, epsilon);
  return make_report(inst, std::move(full), std::nullopt, base.iterations);
}

Allocation top_up(const Instance& inst, const Allocation& alloc,
                  double epsilon) {
  inst.validate();
  if (alloc.amounts.size() != inst.size()) {
    throw std::invalid_argument("top_up: allocation is not aligned with the instance");
  }
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("top_up: epsilon must lie in [0, 1]");
  }
  for (double a : alloc.amounts) {
    if (!(a >= 0.0)) throw std::invalid_argument("top_up: amounts must be >= 0");
  }
  const ServiceProfile input_profile = service_profile(inst, alloc);
  if (input_profile.gap > epsilon + tolerances().fairness_slack) {
    throw std::invalid_argument("top_up: input allocation is not epsilon-fair");
  }
  const double rtol = residual_tol(inst.budget);
  double rem = inst.budget - alloc.total();
  if (rem < -rtol) {
    throw std::invalid_argument("top_up: allocation exceeds the budget");
  }
  if (rem <= rtol) {
    return alloc;
  }

  const std::size_t n = inst.size();
  std::vector<double> r = alloc.amounts;
  std::vector<double> q = input_profile.q_values;
  const double beta_star = *std::max_element(q.begin(), q.end());

  if (beta_star >= 1.0 - 1e-12) {
    // Everyone already saturated; park the remainder on group 0.
    r[0] += rem;
    return Allocation{std::move(r)};
  }

  // Step 1: raise every group below beta* to a common level, as far as the
  // remaining budget allows.
  auto needed_for = [&](double level) {
    double need = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (q[i] < level) {
        need += std::max(0.0, inst.demand(i).inverse_service_prob(level) - r[i]);
      }
    }
    return need;
  };
  const double full_need = needed_for(beta_star);
  if (full_need > rem) {
    const double q_min = *std::min_element(q.begin(), q.end());
    const auto res = numeric::bisect_nondecreasing(needed_for, rem, q_min,
                                                   beta_star, 0.0, 1e-14,
                                                   tolerances().max_bisect_iterations);
    const double level = res.lo;  // needed(lo) <= rem
    double used = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (q[i] < level) {
        const double target = inst.demand(i).inverse_service_prob(level);
        if (target > r[i]) {
          used += target - r[i];
          r[i] = target;
        }
      }
    }
    // Bisection dust goes to the lowest service level, which has headroom
    // up to beta*.
    double dust = rem - used;
    if (dust > 0.0) {
      std::size_t lowest = 0;
      double lowest_q = 2.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double qi = inst.demand(i).service_prob(r[i]);
        if (qi < lowest_q) {
          lowest_q = qi;
          lowest = i;
        }
      }
      r[lowest] += dust;
    }
    return Allocation{std::move(r)};
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i] < beta_star) {
      r[i] = std::max(r[i], inst.demand(i).inverse_service_prob(beta_star));
    }
  }
  rem = inst.budget - std::accumulate(r.begin(), r.end(), 0.0);

  // Steps 2-3: lift the common level in increments of at most
  // min(eps, 1 - level). A degenerate epsilon equalizes directly instead.
  if (epsilon < 1e-6) {
    auto sum_at = [&](double v) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sum += std::max(r[i], alloc_at_fair_v(inst.demand(i), v));
      }
      return sum;
    };
    const LevelOutcome level = solve_level_param(sum_at, inst.budget);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = std::max(r[i], alloc_at_fair_v(inst.demand(i), level.param));
      total += r[i];
    }
    if (inst.budget > total) {
      r[0] += inst.budget - total;
    }
    return Allocation{std::move(r)};
  }

  double level = beta_star;
  while (rem > 1e-15 * std::max(1.0, inst.budget)) {
    if (level >= 1.0 - 1e-12) {
      r[0] += rem;  // step 4: all q at 1 already
      break;
    }
    const double inc = std::min(epsilon, 1.0 - level);
    const double target = level + inc;
    const bool target_is_one = target >= 1.0 - 1e-12;
    bool exhausted = false;
    for (std::size_t i = 0; i < n; ++i) {
      double need;
      if (target_is_one) {
        if (!inst.demand(i).is_discrete()) {
          // Unbounded support absorbs everything before q reaches 1.
          r[i] += rem;
          rem = 0.0;
          exhausted = true;
          break;
        }
        need = std::max(0.0, inst.demand(i).max_support() - r[i]);
      } else {
        need = std::max(0.0, inst.demand(i).inverse_service_prob(target) - r[i]);
      }
      if (need >= rem) {
        r[i] += rem;
        rem = 0.0;
        exhausted = true;
        break;
      }
      r[i] += need;
      rem -= need;
    }
    if (exhausted) break;
    level = target;
  }
  return Allocation{std::move(r)};
}

}  // namespace fairalloc
