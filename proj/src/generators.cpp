#include "fairalloc/generators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairalloc/metrics.hpp"
#include "fairalloc/oracles.hpp"
#include "fairalloc/solvers.hpp"

namespace fairalloc {

namespace {

// Smallest integer strictly greater than x, tolerant of x sitting one ulp
// below an integer. Overshooting by one on such boundaries keeps every
// construction inequality strict, so it is harmless.
double next_integer_above(double x) {
  return std::floor(x + 1e-9) + 1.0;
}

Demand deterministic(double count) {
  return Demand::discrete({{count, 1.0}});
}

}  // namespace

AdversarialResult adversarial_discrete(double epsilon, double rho) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("adversarial_discrete: epsilon must lie in (0, 1)");
  }
  if (!(rho >= 1.0)) {
    throw std::invalid_argument("adversarial_discrete: rho must be >= 1");
  }
  const double inv = 1.0 / epsilon;
  double n;
  double n_prime;
  if (std::abs(inv - std::round(inv)) < 1e-9) {
    n = std::round(inv);
    n_prime = n - 1.0;
  } else {
    n = std::ceil(inv);
    n_prime = std::floor(inv);
  }
  const double m_prime = next_integer_above(rho * epsilon * (1.0 + epsilon) /
                                            (1.0 - epsilon));
  const double budget = n + n_prime * m_prime;
  const double low_groups = budget + 1.0;

  std::vector<Group> groups;
  groups.push_back({"high", deterministic(n)});
  for (double j = 0; j < low_groups; ++j) {
    groups.push_back({"low" + std::to_string(static_cast<long long>(j)),
                      deterministic(n_prime)});
  }

  AdversarialResult out;
  out.kind = "discrete";
  out.instance = make_instance(std::move(groups), budget, AllocationMode::kInteger);
  out.pof_lower_bound = rho;
  out.epsilon = epsilon;
  const double fair_units = std::floor(epsilon * n + 1e-9);
  out.predicted_pof = budget / fair_units;
  out.construction_params = {{"n", n},
                             {"n_prime", n_prime},
                             {"m_prime", m_prime},
                             {"m", low_groups},
                             {"B", budget}};
  return out;
}

AdversarialResult adversarial_fractional(double rho, double k, double p1) {
  if (!(rho > 1.0)) {
    throw std::invalid_argument("adversarial_fractional: rho must exceed 1");
  }
  if (!(k >= 1.0)) {
    throw std::invalid_argument("adversarial_fractional: k must be >= 1");
  }
  if (!(p1 > 0.0) || !(p1 < 1.0)) {
    throw std::invalid_argument("adversarial_fractional: p1 must lie in (0, 1)");
  }
  const double n1 = next_integer_above(2.0 * k * rho - 1.0);
  const double n2 = n1 * n1;
  const double p2 = p1 / n1;

  std::vector<Group> groups;
  groups.push_back({"g1", Demand::discrete({{0.0, 1.0 - p1}, {n1, p1}})});
  groups.push_back({"g2", Demand::discrete({{0.0, 1.0 - p2}, {n2, p2}})});

  AdversarialResult out;
  out.kind = "fractional";
  out.instance = make_instance(std::move(groups), n1, AllocationMode::kFractional);
  out.pof_lower_bound = rho;
  out.predicted_pof = (1.0 + n1) / (2.0 * k);
  out.construction_params = {
      {"n1", n1}, {"n2", n2}, {"p1", p1}, {"p2", p2}, {"k", k}};
  return out;
}

namespace {

// Exhaustive measurement of the discrete construction over the quotient by
// permutation symmetry: every low group is identical, so utilization and the
// fairness gap depend only on the high-group amount and the multiset of
// low-group amounts. Enumerating (r_high, integer partition of the low
// total) is therefore exact while staying polynomial in the budget. The max
// side uses the full budget; the fair side, like exhaustive_discrete_fair,
// ranges over totals up to the budget. With B+1 low groups and at most B
// units spread over them, some low group always sits at zero, so the minimum
// service level is 0 and the gap is the maximum q.
struct SymmetricMeasure {
  double u_max = 0.0;
  double u_fair = 0.0;
};

SymmetricMeasure measure_symmetric_discrete(double n, double n_prime,
                                            double budget, double epsilon) {
  SymmetricMeasure out;
  const auto total = static_cast<long long>(budget);
  const double gap_limit = epsilon + 1e-12;

  for (long long r_high = 0; r_high <= total; ++r_high) {
    const double high_served = std::min(static_cast<double>(r_high), n);
    const double high_q = high_served / n;

    auto consider = [&](long long used_low, double low_value, double low_qmax) {
      const double value = high_served + low_value;
      if (r_high + used_low == total) {
        out.u_max = std::max(out.u_max, value);
      }
      if (std::max(high_q, low_qmax) <= gap_limit) {
        out.u_fair = std::max(out.u_fair, value);
      }
    };
    // Partitions (nonincreasing parts) of every low total up to the
    // remaining budget.
    auto rec = [&](auto&& self, long long used, long long max_part,
                   double value, double q_max) -> void {
      consider(used, value, q_max);
      for (long long part = std::min(total - r_high - used, max_part);
           part >= 1; --part) {
        const double served = std::min(static_cast<double>(part), n_prime);
        self(self, used + part, part, value + served,
             std::max(q_max, served / n_prime));
      }
    };
    rec(rec, 0, total - r_high, 0.0, 0.0);
  }
  return out;
}

}  // namespace

double measured_pof(const AdversarialResult& result) {
  if (result.kind == "discrete") {
    const auto& p = result.construction_params;
    const SymmetricMeasure m = measure_symmetric_discrete(
        p.at("n"), p.at("n_prime"), p.at("B"), result.epsilon);
    if (m.u_fair <= 0.0) return std::numeric_limits<double>::infinity();
    return m.u_max / m.u_fair;
  }
  const double k = result.construction_params.at("k");
  const OracleResult max_side =
      exhaustive_discrete_max(result.instance.with_mode(AllocationMode::kInteger));
  const SolveReport fair_side = fair_exact_zero(
      result.instance.with_budget(k * result.instance.budget));
  return max_side.best_value / fair_side.utilization;
}

}  // namespace fairalloc
