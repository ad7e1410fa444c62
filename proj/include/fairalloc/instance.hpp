#pragma once

#include <string>
#include <vector>

#include "fairalloc/demand.hpp"

namespace fairalloc {

enum class AllocationMode { kInteger, kFractional };

struct Group {
  std::string name;
  Demand demand;
};

// A set of named groups with demand distributions, a budget and an
// allocation mode. Integer mode requires an integer budget.
struct Instance {
  std::vector<Group> groups;
  double budget = 0.0;
  AllocationMode mode = AllocationMode::kFractional;

  std::size_t size() const { return groups.size(); }
  const Demand& demand(std::size_t i) const { return groups[i].demand; }

  bool all_discrete() const;
  bool all_continuous() const;
  /// Sum of max supports; only meaningful when all_discrete().
  double total_max_support() const;

  Instance with_mode(AllocationMode m) const;
  Instance with_budget(double b) const;

  /// Throws std::invalid_argument when any invariant fails.
  void validate() const;
};

// Per-group nonnegative amounts aligned with Instance::groups.
struct Allocation {
  std::vector<double> amounts;

  double total() const;
};

Instance make_instance(std::vector<Group> groups, double budget,
                       AllocationMode mode);

}  // namespace fairalloc
