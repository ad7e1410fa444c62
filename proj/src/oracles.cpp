#include "fairalloc/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "fairalloc/config.hpp"
#include "fairalloc/metrics.hpp"

namespace fairalloc {

namespace {

constexpr double kEnumerationGuard = 1e7;

double compositions_count(double budget, std::size_t n) {
  // C(budget + n - 1, n - 1), evaluated in doubles; only compared against
  // the guard so overflow precision is irrelevant.
  double c = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    c *= (budget + static_cast<double>(k)) / static_cast<double>(k);
    if (c > 1e18) return c;
  }
  return c;
}

// Shared engine for the two integer enumeration oracles, walking allocations
// in lexicographic order while tracking running utilization and the q-range.
// The max oracle visits compositions summing to the budget exactly; the fair
// oracle visits every allocation using at most the budget, since a fairness
// constraint can be satisfiable only below full budget use (the unbounded
// integer PoF construction is the canonical case). The first strict
// improvement wins, so the reported argmax is the lexicographically least.
struct IntegerEnumerator {
  const Instance& inst;
  std::int64_t budget;
  bool exact_total;
  bool use_filter;
  double gap_limit = 0.0;

  std::vector<std::vector<double>> em;  // [group][amount]
  std::vector<std::vector<double>> q;
  std::vector<std::int64_t> current;
  std::vector<std::int64_t> best;
  double best_value = -1.0;
  bool found = false;
  std::int64_t evaluated = 0;

  IntegerEnumerator(const Instance& in, bool exact, bool filter, double eps)
      : inst(in),
        budget(static_cast<std::int64_t>(in.budget)),
        exact_total(exact),
        use_filter(filter),
        gap_limit(eps + 1e-12) {
    const std::size_t n = inst.size();
    em.resize(n);
    q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      em[i].resize(static_cast<std::size_t>(budget) + 1);
      q[i].resize(static_cast<std::size_t>(budget) + 1);
      for (std::int64_t a = 0; a <= budget; ++a) {
        em[i][static_cast<std::size_t>(a)] =
            inst.demand(i).expected_min(static_cast<double>(a));
        q[i][static_cast<std::size_t>(a)] =
            inst.demand(i).service_prob(static_cast<double>(a));
      }
    }
    current.assign(n, 0);
  }

  void run() { recurse(0, budget, 0.0, 1.0, 0.0); }

  void leaf(double util, double q_min, double q_max) {
    ++evaluated;
    if (use_filter && inst.size() > 1 && q_max - q_min > gap_limit) return;
    if (!found || util > best_value) {
      found = true;
      best_value = util;
      best = current;
    }
  }

  void recurse(std::size_t group, std::int64_t remaining, double util,
               double q_min, double q_max) {
    const std::size_t n = inst.size();
    if (group + 1 == n && exact_total) {
      current[group] = remaining;
      const auto a = static_cast<std::size_t>(remaining);
      leaf(util + em[group][a], std::min(q_min, q[group][a]),
           std::max(q_max, q[group][a]));
      return;
    }
    if (group == n) {
      leaf(util, q_min, q_max);
      return;
    }
    for (std::int64_t a = 0; a <= remaining; ++a) {
      current[group] = a;
      const auto idx = static_cast<std::size_t>(a);
      recurse(group + 1, remaining - a, util + em[group][idx],
              std::min(q_min, q[group][idx]), std::max(q_max, q[group][idx]));
    }
  }
};

OracleResult run_integer_oracle(const Instance& inst, bool exact, bool filter,
                                double eps) {
  inst.validate();
  if (inst.mode != AllocationMode::kInteger) {
    throw std::invalid_argument("exhaustive oracle: integer allocation mode required");
  }
  const double count = compositions_count(inst.budget, inst.size());
  if (count > kEnumerationGuard) {
    throw OracleSizeError("exhaustive oracle: " + std::to_string(count) +
                          " candidate allocations exceed the 1e7 guard");
  }
  IntegerEnumerator engine(inst, exact, filter, eps);
  engine.run();
  OracleResult out;
  out.mode = OracleMode::kExhaustiveInteger;
  out.evaluated = engine.evaluated;
  if (engine.found) {
    out.best_value = engine.best_value;
    out.best_allocation.amounts.assign(engine.best.begin(), engine.best.end());
  } else {
    out.feasible = false;
    out.best_value = 0.0;
  }
  return out;
}

}  // namespace

OracleResult exhaustive_discrete_max(const Instance& inst) {
  return run_integer_oracle(inst, /*exact=*/true, /*filter=*/false, 0.0);
}

OracleResult exhaustive_discrete_fair(const Instance& inst, double epsilon) {
  return run_integer_oracle(inst, /*exact=*/false, /*filter=*/true, epsilon);
}

namespace {

struct GridEnumerator {
  const Instance& inst;
  double step;
  std::int64_t lattice_max;  // first n-1 coordinates range over 0..lattice_max
  bool use_filter;
  double gap_limit = 0.0;

  std::vector<std::vector<double>> em;  // [group][lattice index], last group
  std::vector<std::vector<double>> q;   // indexed by total lattice use
  std::vector<std::int64_t> current;
  std::vector<std::int64_t> best;
  double best_value = -1.0;
  bool found = false;
  std::int64_t evaluated = 0;

  GridEnumerator(const Instance& in, double s, bool filter, double eps)
      : inst(in), step(s), use_filter(filter), gap_limit(eps + 1e-9) {
    lattice_max = static_cast<std::int64_t>(std::floor(inst.budget / step + 1e-9));
    const std::size_t n = inst.size();
    em.resize(n);
    q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      em[i].resize(static_cast<std::size_t>(lattice_max) + 1);
      q[i].resize(static_cast<std::size_t>(lattice_max) + 1);
      for (std::int64_t k = 0; k <= lattice_max; ++k) {
        const double r = i + 1 == n
                             ? std::max(0.0, inst.budget - step * static_cast<double>(k))
                             : step * static_cast<double>(k);
        em[i][static_cast<std::size_t>(k)] = inst.demand(i).expected_min(r);
        q[i][static_cast<std::size_t>(k)] = inst.demand(i).service_prob(r);
      }
    }
    current.assign(n, 0);
  }

  double amount(std::size_t group, std::int64_t k) const {
    if (group + 1 == inst.size()) {
      return std::max(0.0, inst.budget - step * static_cast<double>(k));
    }
    return step * static_cast<double>(k);
  }

  void run() { recurse(0, 0, 0.0, 1.0, 0.0); }

  void recurse(std::size_t group, std::int64_t used, double util,
               double q_min, double q_max) {
    const std::size_t n = inst.size();
    if (group + 1 == n) {
      current[group] = used;  // last group absorbs budget - used*step
      const auto idx = static_cast<std::size_t>(used);
      const double total = util + em[group][idx];
      ++evaluated;
      if (use_filter && n > 1) {
        const double lo = std::min(q_min, q[group][idx]);
        const double hi = std::max(q_max, q[group][idx]);
        if (hi - lo > gap_limit) return;
      }
      if (!found || total > best_value) {
        found = true;
        best_value = total;
        best = current;
      }
      return;
    }
    for (std::int64_t k = 0; used + k <= lattice_max; ++k) {
      current[group] = k;
      const auto idx = static_cast<std::size_t>(k);
      recurse(group + 1, used + k, util + em[group][idx],
              std::min(q_min, q[group][idx]), std::max(q_max, q[group][idx]));
    }
  }
};

}  // namespace

OracleResult grid_fractional(const Instance& inst,
                             std::optional<double> epsilon, double step) {
  inst.validate();
  if (inst.mode != AllocationMode::kFractional) {
    throw std::invalid_argument("grid_fractional: fractional mode required");
  }
  if (!(step > 0.0)) {
    throw std::invalid_argument("grid_fractional: step must be positive");
  }
  const double dims = static_cast<double>(inst.size()) - 1.0;
  if (std::pow(inst.budget / step + 1.0, dims) > kEnumerationGuard) {
    throw OracleSizeError("grid_fractional: lattice exceeds the 1e7 guard");
  }
  GridEnumerator engine(inst, step, epsilon.has_value(),
                        epsilon.value_or(0.0));
  engine.run();
  OracleResult out;
  out.mode = OracleMode::kGridFractional;
  out.evaluated = engine.evaluated;
  if (engine.found) {
    out.best_value = engine.best_value;
    out.best_allocation.amounts.reserve(inst.size());
    for (std::size_t i = 0; i < inst.size(); ++i) {
      out.best_allocation.amounts.push_back(engine.amount(i, engine.best[i]));
    }
  } else {
    out.feasible = false;
    out.best_value = 0.0;
  }
  return out;
}

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based substream: one uniform per (seed, replicate, group, draw),
// independent of evaluation order.
inline double uniform01(std::uint64_t seed, std::uint64_t rep,
                        std::uint64_t group, std::uint64_t draw) {
  std::uint64_t h = mix64(seed ^ 0x632be59bd9b4e019ULL);
  h = mix64(h ^ rep);
  h = mix64(h ^ (group * 0x100000001b3ULL + draw));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

constexpr std::int64_t kBlock = 1 << 14;

}  // namespace

MonteCarloResult monte_carlo(const Instance& inst, const Allocation& alloc,
                             std::int64_t reps, std::uint64_t seed,
                             int threads) {
  inst.validate();
  if (alloc.amounts.size() != inst.size()) {
    throw std::invalid_argument("monte_carlo: allocation is not aligned with the instance");
  }
  if (reps < 1) {
    throw std::invalid_argument("monte_carlo: reps must be >= 1");
  }
  const std::size_t n = inst.size();
  const std::int64_t nblocks = (reps + kBlock - 1) / kBlock;

  struct BlockSums {
    double s = 0.0;
    double s2 = 0.0;
    std::vector<double> group;
  };
  std::vector<BlockSums> partial(static_cast<std::size_t>(nblocks));
  for (auto& p : partial) p.group.assign(n, 0.0);

  auto run_block = [&](std::int64_t b) {
    BlockSums& sums = partial[static_cast<std::size_t>(b)];
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(reps, lo + kBlock);
    for (std::int64_t rep = lo; rep < hi; ++rep) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform01(seed, static_cast<std::uint64_t>(rep), i, 0);
        const double x = inst.demand(i).quantile(u);
        double r = alloc.amounts[i];
        const double whole = std::floor(r);
        if (inst.demand(i).is_discrete() && r != whole) {
          const double u2 = uniform01(seed, static_cast<std::uint64_t>(rep), i, 1);
          r = whole + (u2 < r - whole ? 1.0 : 0.0);
        }
        const double served = std::min(x, r);
        s += served;
        sums.group[i] += served;
      }
      sums.s += s;
      sums.s2 += s * s;
    }
  };

  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(
                                                   std::min<std::int64_t>(nblocks, 16))));
  if (workers == 1) {
    for (std::int64_t b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::int64_t b = next.fetch_add(1); b < nblocks;
             b = next.fetch_add(1)) {
          run_block(b);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  // Reduce in block order so the result does not depend on thread count.
  double sum_s = 0.0;
  double sum_s2 = 0.0;
  std::vector<double> group_sum(n, 0.0);
  for (const auto& p : partial) {
    sum_s += p.s;
    sum_s2 += p.s2;
    for (std::size_t i = 0; i < n; ++i) group_sum[i] += p.group[i];
  }

  MonteCarloResult out;
  out.reps = reps;
  out.seed = seed;
  const double mean = sum_s / static_cast<double>(reps);
  out.util_estimate = mean;
  if (reps > 1) {
    const double var =
        std::max(0.0, (sum_s2 - static_cast<double>(reps) * mean * mean) /
                          static_cast<double>(reps - 1));
    out.util_stderr = std::sqrt(var / static_cast<double>(reps));
  }
  out.q_estimates.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.q_estimates.push_back(group_sum[i] / static_cast<double>(reps) /
                              inst.demand(i).mean());
  }
  return out;
}

}  // namespace fairalloc
