#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fairalloc/generators.hpp"
#include "fairalloc/metrics.hpp"
#include "fairalloc/oracles.hpp"
#include "fairalloc/solvers.hpp"
#include "test_support.hpp"

using fairalloc::Allocation;
using fairalloc::AllocationMode;
using fairalloc::Demand;
using fairalloc::Instance;
using fairalloc::OracleResult;
using testsupport::village;

TEST_CASE("exhaustive_discrete_max: village and degenerate budgets") {
  const OracleResult r = fairalloc::exhaustive_discrete_max(village(2, AllocationMode::kInteger));
  CHECK(r.best_allocation.amounts == std::vector<double>{0.0, 2.0});
  CHECK(r.best_value == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(r.evaluated == 3);

  const OracleResult zero = fairalloc::exhaustive_discrete_max(village(0, AllocationMode::kInteger));
  CHECK(zero.best_allocation.amounts == std::vector<double>{0.0, 0.0});
  CHECK(zero.best_value == 0.0);
}

TEST_CASE("exhaustive_discrete_max: adversarial instance hits budget, 1716 candidates") {
  const auto adv = fairalloc::adversarial_discrete(0.5, 2.0);
  const OracleResult r = fairalloc::exhaustive_discrete_max(adv.instance);
  CHECK(r.best_value == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(r.evaluated == 1716);
}

TEST_CASE("exhaustive_discrete_max breaks ties lexicographically") {
  const Demand d = Demand::discrete({{0.0, 0.5}, {2.0, 0.5}});
  const Instance twins =
      fairalloc::make_instance({{"a", d}, {"b", d}}, 1, AllocationMode::kInteger);
  // (0,1) and (1,0) tie exactly; the lexicographically least wins.
  const OracleResult r = fairalloc::exhaustive_discrete_max(twins);
  CHECK(r.best_allocation.amounts == std::vector<double>{0.0, 1.0});
}

TEST_CASE("exhaustive oracles enforce the candidate guard") {
  std::vector<fairalloc::Group> groups;
  for (int i = 0; i < 12; ++i) {
    groups.push_back({"g" + std::to_string(i), Demand::discrete({{0.0, 0.5}, {1.0, 0.5}})});
  }
  const Instance big = fairalloc::make_instance(std::move(groups), 40, AllocationMode::kInteger);
  CHECK_THROWS_AS(fairalloc::exhaustive_discrete_max(big), fairalloc::OracleSizeError);
}

TEST_CASE("exhaustive_discrete_fair: village rows and delegation at eps 1") {
  const Instance inst = village(2, AllocationMode::kInteger);
  const OracleResult r = fairalloc::exhaustive_discrete_fair(inst, 0.2);
  CHECK(r.best_allocation.amounts == std::vector<double>{1.0, 1.0});
  CHECK(r.best_value == doctest::Approx(1.1).epsilon(1e-14));

  const OracleResult unconstrained = fairalloc::exhaustive_discrete_fair(inst, 1.0);
  const OracleResult max = fairalloc::exhaustive_discrete_max(inst);
  CHECK(unconstrained.best_value == max.best_value);

  const auto adv = fairalloc::adversarial_discrete(0.5, 2.0);
  CHECK(fairalloc::exhaustive_discrete_fair(adv.instance, 0.5).best_value ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid_fractional: village fair optima and the single-group edge") {
  const Instance inst = village(2, AllocationMode::kFractional);
  const OracleResult zero = fairalloc::grid_fractional(inst, 0.0, 1e-3);
  CHECK(zero.best_allocation.amounts[0] == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(zero.best_value == doctest::Approx(1.16).epsilon(1e-6));

  const OracleResult band = fairalloc::grid_fractional(inst, 0.2, 1e-3);
  CHECK(band.best_allocation.amounts[0] == doctest::Approx(0.56).epsilon(1e-6));
  CHECK(band.best_value == doctest::Approx(1.232).epsilon(1e-6));

  const Instance single = fairalloc::make_instance({{"g", Demand::exponential(1.0)}}, 2.0,
                                                   AllocationMode::kFractional);
  const OracleResult one = fairalloc::grid_fractional(single, std::nullopt, 5.0);
  CHECK(one.best_allocation.amounts[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(one.evaluated == 1);

  CHECK_THROWS_AS(fairalloc::grid_fractional(inst, std::nullopt, 1e-9),
                  fairalloc::OracleSizeError);
}

TEST_CASE("grid_fractional never beats the water-fill beyond its slack") {
  std::mt19937_64 rng(771001);
  std::uniform_real_distribution<double> bunif(0.4, 4.0);
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<fairalloc::Group> groups;
    const int n = 2 + static_cast<int>(rng() % 2);
    for (int i = 0; i < n; ++i) {
      groups.push_back({"g" + std::to_string(i), testsupport::random_continuous_demand(rng)});
    }
    const Instance inst =
        fairalloc::make_instance(std::move(groups), bunif(rng), AllocationMode::kFractional);
    const double analytic = fairalloc::waterfill_continuous(inst).utilization;
    const OracleResult grid = fairalloc::grid_fractional(inst, std::nullopt, 0.05);
    double slack = 0.0;
    for (const auto& g : inst.groups) slack += g.demand.survival(0.0) * 0.05;
    CHECK(grid.best_value <= analytic + 1e-9);
    CHECK(grid.best_value >= analytic - slack - 1e-9);
  }
}

TEST_CASE("monte_carlo: village estimates match the table values") {
  const Instance inst = village(2, AllocationMode::kInteger);
  const auto r11 = fairalloc::monte_carlo(inst, Allocation{{1.0, 1.0}}, 1000000, 42);
  CHECK(std::abs(r11.util_estimate - 1.1) <= 3.0 * r11.util_stderr);
  const auto r02 = fairalloc::monte_carlo(inst, Allocation{{0.0, 2.0}}, 1000000, 43);
  // Only group B contributes under (0, 2), so q_B = estimate / mean_B and its
  // standard error scales the same way.
  CHECK(std::abs(r02.q_estimates[1] - 2.0 / 3.0) <= 3.0 * r02.util_stderr / 2.1);
  CHECK(std::abs(r02.util_estimate - 1.4) <= 3.0 * r02.util_stderr);
}

TEST_CASE("monte_carlo: deterministic across seeds, reps and thread counts") {
  const Instance inst = village(2, AllocationMode::kFractional);
  const Allocation alloc{{0.7, 1.3}};
  const auto a = fairalloc::monte_carlo(inst, alloc, 50000, 9001, 1);
  const auto b = fairalloc::monte_carlo(inst, alloc, 50000, 9001, 1);
  const auto c = fairalloc::monte_carlo(inst, alloc, 50000, 9001, 4);
  const auto d = fairalloc::monte_carlo(inst, alloc, 50000, 9001, 7);
  CHECK(a.util_estimate == b.util_estimate);
  CHECK(a.util_estimate == c.util_estimate);
  CHECK(a.util_estimate == d.util_estimate);
  CHECK(a.util_stderr == c.util_stderr);
  CHECK(a.q_estimates == c.q_estimates);
  CHECK(a.q_estimates == d.q_estimates);

  const auto single = fairalloc::monte_carlo(inst, alloc, 1, 123);
  const auto single2 = fairalloc::monte_carlo(inst, alloc, 1, 123);
  CHECK(single.util_estimate == single2.util_estimate);
  CHECK(single.util_stderr == 0.0);

  CHECK_THROWS_AS(fairalloc::monte_carlo(inst, alloc, 0, 1), std::invalid_argument);
}

TEST_CASE("monte_carlo converges at the 4-sigma level on random instances") {
  std::mt19937_64 rng(771002);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int misses = 0;
  const int trials = 150;
  for (int t = 0; t < trials; ++t) {
    std::vector<fairalloc::Group> groups;
    std::vector<double> amounts;
    const int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      const bool discrete = (rng() % 2) == 0;
      groups.push_back({"g" + std::to_string(i),
                        discrete ? testsupport::random_discrete_demand(rng)
                                 : testsupport::random_continuous_demand(rng)});
      amounts.push_back(3.0 * unif(rng));
    }
    const double budget = std::accumulate(amounts.begin(), amounts.end(), 0.0);
    const Instance inst =
        fairalloc::make_instance(std::move(groups), budget, AllocationMode::kFractional);
    const Allocation alloc{amounts};
    const auto mc = fairalloc::monte_carlo(inst, alloc, 20000, 5000 + t);
    const double analytic = fairalloc::utilization(inst, alloc);
    if (std::abs(mc.util_estimate - analytic) > 4.0 * std::max(mc.util_stderr, 1e-12)) {
      ++misses;
    }
  }
  CHECK(misses <= trials / 100);  // >= 99% inside 4 standard errors
}

TEST_CASE("exhaustive max equals greedy on random instances") {
  std::mt19937_64 rng(771003);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance inst = testsupport::random_integer_instance(rng);
    const OracleResult oracle = fairalloc::exhaustive_discrete_max(inst);
    const double greedy = fairalloc::greedy_discrete(inst).utilization;
    const double ulps = 8.0 * std::numeric_limits<double>::epsilon() *
                        std::max(1.0, oracle.best_value);
    CHECK(std::abs(greedy - oracle.best_value) <= ulps);
    CHECK(oracle.best_value ==
          doctest::Approx(fairalloc::utilization(inst, oracle.best_allocation)).epsilon(1e-12));
  }
}
