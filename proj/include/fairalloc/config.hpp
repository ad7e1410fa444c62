#pragma once

namespace fairalloc {

// Numeric tolerances shared across the library. Values are the library
// defaults; callers that need different trade-offs (e.g. the CLI honoring
// FAIRALLOC_TOL) adjust the global instance before solving.
struct Tolerances {
  // Discrete support probabilities must sum to 1 within this bound.
  double discrete_prob_sum = 1e-12;
  // Absolute tolerance of the adaptive Simpson quadrature used for the
  // Weibull survival integrals.
  double quadrature_abs = 1e-10;
  // Survival integration stops where the survival function drops below this.
  double survival_cutoff = 1e-14;
  // Absolute tolerance on r for inverse_service_prob bisections.
  double inverse_q_r = 1e-12;
  // Budget residual threshold factor: a solve counts as converged when
  // |sum(alloc) - budget| <= residual_factor * max(1, budget).
  double residual_factor = 1e-9;
  // Slack allowed when checking epsilon-fairness of an allocation.
  double fairness_slack = 1e-8;
  // Cap on bisection iterations for all level searches.
  int max_bisect_iterations = 200;
};

Tolerances& tolerances();

}  // namespace fairalloc
