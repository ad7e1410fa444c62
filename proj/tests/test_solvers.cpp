#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fairalloc/metrics.hpp"
#include "fairalloc/oracles.hpp"
#include "fairalloc/solvers.hpp"
#include "test_support.hpp"

using fairalloc::Allocation;
using fairalloc::AllocationMode;
using fairalloc::Demand;
using fairalloc::Instance;
using fairalloc::SolveReport;
using testsupport::village;

TEST_CASE("greedy_discrete: village fixture and trivial budgets") {
  const SolveReport r = fairalloc::greedy_discrete(village(2, AllocationMode::kInteger));
  CHECK(r.allocation.amounts == std::vector<double>{0.0, 2.0});
  CHECK(r.utilization == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(r.residual == 0.0);

  const SolveReport zero = fairalloc::greedy_discrete(village(0, AllocationMode::kInteger));
  CHECK(zero.allocation.amounts == std::vector<double>{0.0, 0.0});
  CHECK(zero.utilization == 0.0);

  CHECK_THROWS_AS(fairalloc::greedy_discrete(village(2, AllocationMode::kFractional)),
                  std::invalid_argument);
}

TEST_CASE("greedy_discrete: identical groups split evenly, ties to low index") {
  const Demand half = Demand::discrete({{0.0, 0.5}, {1.0, 0.5}});
  const Instance inst = fairalloc::make_instance(
      {{"a", half}, {"b", half}, {"c", half}}, 3, AllocationMode::kInteger);
  const SolveReport r = fairalloc::greedy_discrete(inst);
  CHECK(r.allocation.amounts == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(r.utilization == doctest::Approx(1.5).epsilon(1e-14));
  const auto oracle = fairalloc::exhaustive_discrete_max(inst);
  CHECK(r.utilization == oracle.best_value);
}

TEST_CASE("greedy_discrete matches the exhaustive oracle on random instances") {
  std::mt19937_64 rng(555001);
  for (int trial = 0; trial < 60; ++trial) {
    const Instance inst = testsupport::random_integer_instance(rng);
    const SolveReport greedy = fairalloc::greedy_discrete(inst);
    const auto oracle = fairalloc::exhaustive_discrete_max(inst);
    // Tied optima reached through different allocations can differ by
    // summation order; anything beyond a few ulps is a real defect.
    const double ulps = 8.0 * std::numeric_limits<double>::epsilon() *
                        std::max(1.0, oracle.best_value);
    CHECK(std::abs(greedy.utilization - oracle.best_value) <= ulps);
  }
}

TEST_CASE("waterfill_continuous: exponentials follow the rate-proportional form") {
  const SolveReport r = fairalloc::waterfill_continuous(testsupport::two_exponentials(1.0, 2.0, 3.0));
  CHECK(r.allocation.amounts[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.allocation.amounts[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.level.value() == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-9));
  CHECK(r.residual <= 1e-9 * 3.0);
  CHECK(r.profile.gap <= 1e-8);  // scaled family: water level equalizes q too
}

TEST_CASE("waterfill_continuous: single group takes the whole budget") {
  const Instance inst = fairalloc::make_instance({{"g", Demand::weibull(1.7, 2.0)}},
                                                 4.2, AllocationMode::kFractional);
  const SolveReport r = fairalloc::waterfill_continuous(inst);
  CHECK(r.allocation.amounts[0] == doctest::Approx(4.2).epsilon(1e-9));

  const SolveReport zero =
      fairalloc::waterfill_continuous(testsupport::two_exponentials(1.0, 2.0, 0.0));
  CHECK(zero.allocation.amounts == std::vector<double>{0.0, 0.0});
  CHECK(zero.level.value() == 0.0);
}

TEST_CASE("waterfill_continuous: two-lomax solution matches a root-finder oracle") {
  const Instance inst = fairalloc::make_instance(
      {{"g1", Demand::lomax(2.0)}, {"g2", Demand::lomax(3.0)}}, 3.0,
      AllocationMode::kFractional);
  // Oracle: solve 2 ln(1+r) = 3 ln(4-r) independently of the solver.
  const double r1 = testsupport::bisect_root(
      [](double r) { return 2.0 * std::log1p(r) - 3.0 * std::log(4.0 - r); }, 0.0, 3.0);
  CHECK(r1 == doctest::Approx(1.945285132469912).epsilon(1e-12));
  const SolveReport r = fairalloc::waterfill_continuous(inst);
  CHECK(r.allocation.amounts[0] == doctest::Approx(r1).epsilon(1e-8));
  CHECK(r.allocation.amounts[1] == doctest::Approx(3.0 - r1).epsilon(1e-8));
  CHECK_THROWS_AS(fairalloc::waterfill_continuous(village(2, AllocationMode::kFractional)),
                  std::invalid_argument);
}

TEST_CASE("waterfill_continuous: the water level equalizes every cdf") {
  std::mt19937_64 rng(555002);
  std::uniform_real_distribution<double> bunif(0.3, 8.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<fairalloc::Group> groups;
    const int n = 2 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      groups.push_back({"g" + std::to_string(i), testsupport::random_continuous_demand(rng)});
    }
    const Instance inst =
        fairalloc::make_instance(std::move(groups), bunif(rng), AllocationMode::kFractional);
    const SolveReport r = fairalloc::waterfill_continuous(inst);
    CHECK(r.residual <= 1e-9 * std::max(1.0, inst.budget));
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (r.allocation.amounts[i] > 0.0) {
        CHECK(inst.demand(i).cdf(r.allocation.amounts[i]) ==
              doctest::Approx(r.level.value()).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("fair_exact_zero: village splits 0.8/1.2 at common level 0.4") {
  const SolveReport r = fairalloc::fair_exact_zero(village(2, AllocationMode::kFractional));
  CHECK(r.allocation.amounts[0] == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(r.allocation.amounts[1] == doctest::Approx(1.2).epsilon(1e-9));
  CHECK(r.utilization == doctest::Approx(1.16).epsilon(1e-9));
  CHECK(r.level.value() == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(r.profile.gap <= 1e-8);
  // Confirmed against the fine grid oracle.
  const auto grid = fairalloc::grid_fractional(village(2, AllocationMode::kFractional), 0.0, 1e-3);
  CHECK(grid.best_value == doctest::Approx(r.utilization).epsilon(1e-6));
}

TEST_CASE("fair_exact_zero: exponentials coincide with the waterfill (PoF 1)") {
  const Instance inst = testsupport::two_exponentials(1.0, 2.0, 3.0);
  const SolveReport fair = fairalloc::fair_exact_zero(inst);
  CHECK(fair.allocation.amounts[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(fair.allocation.amounts[1] == doctest::Approx(1.0).epsilon(1e-8));

  const Instance single = fairalloc::make_instance({{"g", Demand::lomax(2.5)}}, 5.0,
                                                   AllocationMode::kFractional);
  CHECK(fairalloc::fair_exact_zero(single).allocation.amounts[0] ==
        doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("fair_exact_zero: q values equalize on mixed instances") {
  std::mt19937_64 rng(555003);
  std::uniform_real_distribution<double> bunif(0.2, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<fairalloc::Group> groups;
    const int n = 2 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      const bool discrete = (rng() % 2) == 0;
      groups.push_back({"g" + std::to_string(i),
                        discrete ? testsupport::random_discrete_demand(rng)
                                 : testsupport::random_continuous_demand(rng)});
    }
    const Instance inst =
        fairalloc::make_instance(std::move(groups), bunif(rng), AllocationMode::kFractional);
    const SolveReport r = fairalloc::fair_exact_zero(inst);
    CHECK(r.residual <= 1e-9 * std::max(1.0, inst.budget));
    for (double q : r.profile.q_values) {
      CHECK(q == doctest::Approx(r.level.value()).epsilon(1e-8));
    }
  }
}

TEST_CASE("fair_exact_zero: all-discrete saturation parks surplus on group 0") {
  const Instance inst = village(9, AllocationMode::kFractional);  // supports total 5
  const SolveReport r = fairalloc::fair_exact_zero(inst);
  CHECK(r.allocation.amounts[0] == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(r.allocation.amounts[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.profile.gap == 0.0);
  CHECK(r.utilization == doctest::Approx(0.8 + 2.1).epsilon(1e-12));
}

TEST_CASE("fair_band: village at eps 0.2 maximizes inside the band") {
  const SolveReport r = fairalloc::fair_band(village(2, AllocationMode::kFractional), 0.2);
  CHECK(r.allocation.amounts[0] == doctest::Approx(0.56).epsilon(1e-7));
  CHECK(r.allocation.amounts[1] == doctest::Approx(1.44).epsilon(1e-7));
  CHECK(r.utilization == doctest::Approx(1.232).epsilon(1e-7));
  CHECK(r.profile.q_values[0] == doctest::Approx(0.28).epsilon(1e-6));
  CHECK(r.profile.q_values[1] == doctest::Approx(0.48).epsilon(1e-6));
  // Grid-oracle confirmation at step 1e-3.
  const auto grid = fairalloc::grid_fractional(village(2, AllocationMode::kFractional), 0.2, 1e-3);
  CHECK(r.utilization >= grid.best_value - 1e-9);
}

TEST_CASE("fair_band: eps 1 is unconstrained, eps 0 is the exact-fair solve") {
  const SolveReport max = fairalloc::fair_band(village(2, AllocationMode::kFractional), 1.0);
  CHECK(max.allocation.amounts == std::vector<double>{0.0, 2.0});
  CHECK(max.utilization == doctest::Approx(1.4).epsilon(1e-12));

  const SolveReport zero = fairalloc::fair_band(village(2, AllocationMode::kFractional), 0.0);
  const SolveReport direct = fairalloc::fair_exact_zero(village(2, AllocationMode::kFractional));
  CHECK(zero.allocation.amounts[0] == direct.allocation.amounts[0]);
  CHECK(zero.allocation.amounts[1] == direct.allocation.amounts[1]);

  CHECK_THROWS_AS(fairalloc::fair_band(village(2, AllocationMode::kFractional), 1.5),
                  std::invalid_argument);
}

TEST_CASE("fair_band: eps 1 on a mixed instance delegates to the grid-backed max") {
  const Instance mixed = fairalloc::make_instance(
      {{"d", Demand::discrete({{0.0, 0.6}, {2.0, 0.4}})}, {"e", Demand::exponential(1.5)}},
      2.0, AllocationMode::kFractional);
  const SolveReport unconstrained = fairalloc::fair_band(mixed, 1.0);
  CHECK(unconstrained.residual <= 1e-9 * 2.0);
  // Any banded solve is dominated by the unconstrained one, up to grid slack.
  const SolveReport banded = fairalloc::fair_band(mixed, 0.3);
  CHECK(unconstrained.utilization >= banded.utilization - 3e-3);
}

TEST_CASE("fair_band: utilization is nondecreasing in eps") {
  const Instance instances[] = {
      village(2, AllocationMode::kFractional),
      fairalloc::make_instance({{"g1", Demand::lomax(1.6)},
                                {"g2", Demand::exponential(0.8)},
                                {"g3", Demand::weibull(1.4, 1.1)}},
                               2.5, AllocationMode::kFractional),
  };
  for (const Instance& inst : instances) {
    double prev = -1.0;
    for (int k = 0; k <= 20; ++k) {
      const double eps = k / 20.0;
      const double util = fairalloc::fair_band(inst, eps).utilization;
      CHECK(util >= prev - 1e-9);
      prev = util;
    }
  }
}

TEST_CASE("fair_band stays epsilon-fair and on budget") {
  std::mt19937_64 rng(555004);
  std::uniform_real_distribution<double> bunif(0.3, 3.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<fairalloc::Group> groups;
    const int n = 2 + static_cast<int>(rng() % 2);
    for (int i = 0; i < n; ++i) {
      const bool discrete = (rng() % 3) == 0;
      groups.push_back({"g" + std::to_string(i),
                        discrete ? testsupport::random_discrete_demand(rng)
                                 : testsupport::random_continuous_demand(rng)});
    }
    const Instance inst =
        fairalloc::make_instance(std::move(groups), bunif(rng), AllocationMode::kFractional);
    for (double eps : {0.1, 0.3, 0.7}) {
      const SolveReport r = fairalloc::fair_band(inst, eps);
      CHECK(r.profile.gap <= eps + 1e-8);
      CHECK(r.residual <= 1e-9 * std::max(1.0, inst.budget));
    }
  }
}

TEST_CASE("clamp_to_fair: village walkthrough at eps 0.5") {
  const SolveReport r = fairalloc::clamp_to_fair(village(2, AllocationMode::kFractional), 0.5);
  CHECK(r.allocation.amounts[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.allocation.amounts[1] == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(r.utilization == doctest::Approx(1.25).epsilon(1e-8));
  CHECK(r.utilization >= 0.5 * 1.4 - 1e-9);
  CHECK(r.profile.gap <= 0.5 + 1e-8);
  CHECK_THROWS_AS(fairalloc::clamp_to_fair(village(2, AllocationMode::kFractional), 0.0),
                  std::invalid_argument);
}

TEST_CASE("clamp_to_fair: already-fair allocations pass through") {
  const Instance exp_pair = testsupport::two_exponentials(1.0, 2.0, 3.0);
  const SolveReport max = fairalloc::waterfill_continuous(exp_pair);
  for (double eps : {0.05, 0.5, 0.9}) {
    const SolveReport r = fairalloc::clamp_to_fair(exp_pair, eps);
    CHECK(r.allocation.amounts[0] == doctest::Approx(max.allocation.amounts[0]).epsilon(1e-9));
    CHECK(r.allocation.amounts[1] == doctest::Approx(max.allocation.amounts[1]).epsilon(1e-9));
  }
  const Instance single = fairalloc::make_instance({{"g", Demand::exponential(1.0)}}, 2.0,
                                                   AllocationMode::kFractional);
  CHECK(fairalloc::clamp_to_fair(single, 0.25).allocation.amounts[0] ==
        doctest::Approx(2.0).epsilon(1e-9));
  // eps = 1 never clamps: every profile has gap <= 1.
  const SolveReport eps1 = fairalloc::clamp_to_fair(exp_pair, 1.0);
  CHECK(eps1.utilization == doctest::Approx(max.utilization).epsilon(1e-12));
}

TEST_CASE("instance validation rejects a fractional budget in integer mode") {
  CHECK_THROWS_AS(testsupport::village(1.5, AllocationMode::kInteger),
                  std::invalid_argument);
  CHECK_THROWS_AS(fairalloc::make_instance({}, 2.0, AllocationMode::kInteger),
                  std::invalid_argument);
}

TEST_CASE("clamp_to_fair: the 1/eps guarantee holds across instances") {
  std::mt19937_64 rng(555005);
  std::uniform_real_distribution<double> bunif(0.4, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<fairalloc::Group> groups;
    const int n = 2 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      groups.push_back({"g" + std::to_string(i), testsupport::random_continuous_demand(rng)});
    }
    const Instance inst =
        fairalloc::make_instance(std::move(groups), bunif(rng), AllocationMode::kFractional);
    const double u_max = fairalloc::waterfill_continuous(inst).utilization;
    for (double eps : {0.05, 0.1, 0.25, 0.5, 0.9}) {
      const SolveReport r = fairalloc::clamp_to_fair(inst, eps);
      CHECK(r.profile.gap <= eps + 1e-8);
      CHECK(r.residual <= 1e-9 * std::max(1.0, inst.budget));
      CHECK(r.utilization >= eps * u_max - 1e-9);
    }
  }
}

TEST_CASE("top_up: village partial raise exhausts the budget at 0.5") {
  const Instance inst = village(2, AllocationMode::kFractional);
  const Allocation result = fairalloc::top_up(inst, Allocation{{0.0, 1.5}}, 0.5);
  CHECK(result.amounts[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(result.amounts[1] == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("top_up: full allocations return unchanged, invalid inputs rejected") {
  const Instance inst = village(2, AllocationMode::kFractional);
  const Allocation same = fairalloc::top_up(inst, Allocation{{0.8, 1.2}}, 0.1);
  CHECK(same.amounts == std::vector<double>{0.8, 1.2});
  // (0, 1.5) has gap 0.5: not 0.2-fair.
  CHECK_THROWS_AS(fairalloc::top_up(inst, Allocation{{0.0, 1.5}}, 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(fairalloc::top_up(inst, Allocation{{2.0, 1.5}}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("top_up: saturated discrete instances park surplus on group 0") {
  const Instance inst = village(8, AllocationMode::kFractional);
  const Allocation result = fairalloc::top_up(inst, Allocation{{1.0, 1.5}}, 0.5);
  CHECK(result.amounts[0] + result.amounts[1] == doctest::Approx(8.0).epsilon(1e-9));
  const auto profile = fairalloc::service_profile(inst, result);
  CHECK(profile.q_values[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(profile.q_values[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(result.amounts[0] >= 2.0);  // own saturation plus the surplus
}

TEST_CASE("top_up: monotone utilization, fairness preserved, budget reached") {
  std::mt19937_64 rng(555006);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<fairalloc::Group> groups;
    const int n = 2 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      const bool discrete = (rng() % 2) == 0;
      groups.push_back({"g" + std::to_string(i),
                        discrete ? testsupport::random_discrete_demand(rng)
                                 : testsupport::random_continuous_demand(rng)});
    }
    const double budget = 0.5 + 4.0 * unif(rng);
    const Instance inst =
        fairalloc::make_instance(std::move(groups), budget, AllocationMode::kFractional);
    // Start from a scaled-down 0-fair allocation, which is eps-fair for any eps.
    const SolveReport fair = fairalloc::fair_exact_zero(inst);
    Allocation partial = fair.allocation;
    const double shrink = 0.2 + 0.6 * unif(rng);
    for (double& a : partial.amounts) a *= shrink;
    // Scaling a 0-fair allocation opens a gap; pick eps above it.
    const double gap0 = fairalloc::service_profile(inst, partial).gap;
    const double eps = std::min(1.0, gap0 + 0.02 + 0.5 * unif(rng));
    const double util_before = fairalloc::utilization(inst, partial);

    const Allocation full = fairalloc::top_up(inst, partial, eps);
    CHECK(full.total() == doctest::Approx(budget).epsilon(1e-9));
    CHECK(fairalloc::utilization(inst, full) >= util_before - 1e-12);
    CHECK(fairalloc::service_profile(inst, full).gap <= eps + 1e-8);
  }
}
