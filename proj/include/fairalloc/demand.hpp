#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fairalloc {

// Demand distribution of one group: a finite discrete table or one of the
// Exponential / Weibull / Lomax families. Instances are immutable values;
// every query is a pure function, safe to call concurrently.
//
// Construction validates:
//   - Discrete: counts nonnegative integers, strictly increasing; probs >= 0
//     summing to 1 within tolerances().discrete_prob_sum; positive mass on
//     some count > 0 (so the mean is positive). Probabilities are then
//     normalized to exact unit mass.
//   - Exponential: rate > 0. Weibull: shape > 0, scale > 0.
//   - Lomax: alpha > 1 (the mean diverges otherwise).
class Demand {
 public:
  struct Discrete {
    std::vector<double> counts;
    std::vector<double> probs;
    std::vector<double> cum;   // cum[j]  = P(X <= counts[j]); cum.back() == 1
    std::vector<double> wsum;  // wsum[j] = sum_{l<=j} counts[l] * probs[l]
  };
  struct Exponential {
    double rate;
  };
  struct Weibull {
    double shape;
    double scale;
    double cutoff;  // survival < tolerances().survival_cutoff beyond this
  };
  struct Lomax {
    double alpha;
  };

  static Demand discrete(const std::vector<std::pair<double, double>>& support);
  static Demand exponential(double rate);
  static Demand weibull(double shape, double scale);
  static Demand lomax(double alpha);

  /// E[X]; positive for every constructible demand. Weibull uses quadrature
  /// of the survival function, the others use closed forms.
  double mean() const { return mean_; }

  /// F(x) for x >= 0; a right-continuous step function for Discrete.
  double cdf(double x) const;

  /// 1 - F(x), evaluated directly for precision deep in the tail.
  double survival(double x) const;

  /// Least x with F(x) >= tau, tau in [0, 1). Exact closed forms for the
  /// continuous families, generalized inverse over the support for Discrete.
  double quantile(double tau) const;

  /// F^{-1}(1 - s) for survival level s in (0, 1]; continuous families only.
  /// Keeps full precision when 1 - s would round to 1.
  double quantile_by_survival(double s) const;

  /// E[min(X, r)] for r >= 0. Nondecreasing and concave in r, tends to
  /// mean() as r grows. Fractional r over Discrete follows the
  /// deterministic-fractional reading: partial mass below floor(r) plus
  /// r * P(X > floor(r)).
  double expected_min(double r) const;

  /// q(r) = expected_min(r) / mean(), the probability a candidate in this
  /// group is served conditional on needing the resource.
  double service_prob(double r) const;

  /// Least r with service_prob(r) >= m, m in [0, 1). Closed forms for
  /// Exponential and Lomax; bisection over [0, bracket] otherwise, where the
  /// bracket is quantile(1 - 1e-12) for Weibull and the max support for
  /// Discrete.
  double inverse_service_prob(double m) const;

  /// inverse_service_prob at level 1 - s, taking the survival-side value s
  /// so levels within an ulp of 1 stay meaningful.
  double inverse_service_by_survival(double s) const;

  bool is_discrete() const { return std::holds_alternative<Discrete>(dist_); }

  /// Largest support count (Discrete only).
  double max_support() const;

  const std::variant<Discrete, Exponential, Weibull, Lomax>& dist() const {
    return dist_;
  }

  std::string describe() const;

 private:
  Demand() = default;

  std::variant<Discrete, Exponential, Weibull, Lomax> dist_;
  double mean_ = 0.0;
};

}  // namespace fairalloc
