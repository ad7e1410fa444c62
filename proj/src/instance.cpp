#include "fairalloc/instance.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fairalloc {

bool Instance::all_discrete() const {
  for (const auto& g : groups) {
    if (!g.demand.is_discrete()) return false;
  }
  return true;
}

bool Instance::all_continuous() const {
  for (const auto& g : groups) {
    if (g.demand.is_discrete()) return false;
  }
  return true;
}

double Instance::total_max_support() const {
  double total = 0.0;
  for (const auto& g : groups) total += g.demand.max_support();
  return total;
}

Instance Instance::with_mode(AllocationMode m) const {
  Instance copy = *this;
  copy.mode = m;
  return copy;
}

Instance Instance::with_budget(double b) const {
  Instance copy = *this;
  copy.budget = b;
  return copy;
}

void Instance::validate() const {
  if (groups.empty()) {
    throw std::invalid_argument("instance: at least one group required");
  }
  if (!std::isfinite(budget) || budget < 0.0) {
    throw std::invalid_argument("instance: budget must be finite and >= 0");
  }
  if (mode == AllocationMode::kInteger && budget != std::floor(budget)) {
    throw std::invalid_argument("instance: integer mode requires an integer budget");
  }
}

double Allocation::total() const {
  return std::accumulate(amounts.begin(), amounts.end(), 0.0);
}

Instance make_instance(std::vector<Group> groups, double budget,
                       AllocationMode mode) {
  Instance inst{std::move(groups), budget, mode};
  inst.validate();
  return inst;
}

}  // namespace fairalloc
