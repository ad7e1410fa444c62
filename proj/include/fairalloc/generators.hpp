#pragma once

#include <map>
#include <string>

#include "fairalloc/instance.hpp"

namespace fairalloc {

// An instance constructed to force a provable Price-of-Fairness lower bound.
struct AdversarialResult {
  std::string kind;  // "discrete" | "fractional"
  Instance instance;
  double pof_lower_bound = 1.0;  // rho
  double predicted_pof = 1.0;    // exact value of the construction
  double epsilon = 0.0;          // discrete construction only
  std::map<std::string, double> construction_params;
};

/// Integer-allocation construction with PoF > rho at fairness level epsilon:
/// one deterministic-n group (n = ceil(1/eps)) plus B+1 deterministic-n'
/// groups, with budget B = n + n'*m' and m' the smallest integer exceeding
/// rho*eps*(1+eps)/(1-eps). Max utilization is B; the best eps-fair integer
/// utilization is floor(eps*n).
AdversarialResult adversarial_discrete(double epsilon, double rho);

/// Two-group fractional construction with PoF = (1+n1)/(2k) > rho even when
/// the fair side's budget is multiplied by k: n1 the smallest integer
/// exceeding 2*k*rho - 1, n2 = n1^2, p2 = p1/n1, budget n1.
AdversarialResult adversarial_fractional(double rho, double k = 1.0,
                                         double p1 = 0.5);

/// PoF measured with independent machinery: the discrete construction is
/// enumerated exhaustively over the quotient by permutations of its
/// identical low groups (exact, and feasible far beyond the generic
/// oracle's candidate guard); the fractional one pits the integer
/// enumeration optimum against fair_exact_zero at budget k*B.
double measured_pof(const AdversarialResult& result);

}  // namespace fairalloc
