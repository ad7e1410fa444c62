#include "fairalloc/demand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairalloc/config.hpp"
#include "fairalloc/numeric.hpp"

namespace fairalloc {

Tolerances& tolerances() {
  static Tolerances tol;
  return tol;
}

namespace {

double weibull_survival(const Demand::Weibull& w, double x) {
  return std::exp(-std::pow(x / w.scale, w.shape));
}

// Index of the last support point <= x, or -1 when x precedes the support.
int last_support_at_most(const Demand::Discrete& d, double x) {
  auto it = std::upper_bound(d.counts.begin(), d.counts.end(), x);
  return static_cast<int>(it - d.counts.begin()) - 1;
}

}  // namespace

Demand Demand::discrete(const std::vector<std::pair<double, double>>& support) {
  if (support.empty()) {
    throw std::invalid_argument("discrete demand: empty support");
  }
  Discrete d;
  double prev = -1.0;
  double total = 0.0;
  for (const auto& [count, prob] : support) {
    if (!(count >= 0.0) || count != std::floor(count)) {
      throw std::invalid_argument("discrete demand: counts must be nonnegative integers");
    }
    if (count <= prev) {
      throw std::invalid_argument("discrete demand: counts must be strictly increasing");
    }
    if (!(prob >= 0.0)) {
      throw std::invalid_argument("discrete demand: probabilities must be >= 0");
    }
    prev = count;
    total += prob;
    d.counts.push_back(count);
    d.probs.push_back(prob);
  }
  if (std::abs(total - 1.0) > tolerances().discrete_prob_sum) {
    throw std::invalid_argument("discrete demand: probabilities must sum to 1");
  }
  double mean = 0.0;
  double cum = 0.0;
  for (std::size_t j = 0; j < d.counts.size(); ++j) {
    d.probs[j] /= total;  // exact unit mass keeps the survival table clean
    cum += d.probs[j];
    mean += d.counts[j] * d.probs[j];
    d.cum.push_back(cum);
    d.wsum.push_back(mean);
  }
  d.cum.back() = 1.0;
  if (!(mean > 0.0)) {
    throw std::invalid_argument("discrete demand: mean must be positive");
  }
  Demand out;
  out.dist_ = std::move(d);
  out.mean_ = mean;
  return out;
}

Demand Demand::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("exponential demand: rate must be positive");
  }
  Demand out;
  out.dist_ = Exponential{rate};
  out.mean_ = 1.0 / rate;
  return out;
}

Demand Demand::weibull(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) ||
      !std::isfinite(scale)) {
    throw std::invalid_argument("weibull demand: shape and scale must be positive");
  }
  Weibull w{shape, scale, 0.0};
  w.cutoff = scale * std::pow(-std::log(tolerances().survival_cutoff), 1.0 / shape);
  Demand out;
  out.mean_ = numeric::adaptive_simpson(
      [&w](double t) { return weibull_survival(w, t); }, 0.0, w.cutoff,
      tolerances().quadrature_abs);
  out.dist_ = w;
  return out;
}

Demand Demand::lomax(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("lomax demand: alpha must exceed 1");
  }
  Demand out;
  out.dist_ = Lomax{alpha};
  out.mean_ = 1.0 / (alpha - 1.0);
  return out;
}

double Demand::cdf(double x) const {
  if (!(x >= 0.0)) {
    throw std::invalid_argument("cdf: x must be >= 0");
  }
  return std::visit(
      [x](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          const int j = last_support_at_most(d, x);
          return j < 0 ? 0.0 : d.cum[static_cast<std::size_t>(j)];
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -std::expm1(-d.rate * x);
        } else if constexpr (std::is_same_v<T, Weibull>) {
          return -std::expm1(-std::pow(x / d.scale, d.shape));
        } else {
          return -std::expm1(-d.alpha * std::log1p(x));
        }
      },
      dist_);
}

double Demand::survival(double x) const {
  if (!(x >= 0.0)) {
    throw std::invalid_argument("survival: x must be >= 0");
  }
  return std::visit(
      [x](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          const int j = last_support_at_most(d, x);
          return j < 0 ? 1.0 : std::max(0.0, 1.0 - d.cum[static_cast<std::size_t>(j)]);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return std::exp(-d.rate * x);
        } else if constexpr (std::is_same_v<T, Weibull>) {
          return weibull_survival(d, x);
        } else {
          return std::exp(-d.alpha * std::log1p(x));
        }
      },
      dist_);
}

double Demand::quantile(double tau) const {
  if (!(tau >= 0.0) || tau >= 1.0) {
    throw std::invalid_argument("quantile: tau must lie in [0, 1)");
  }
  if (const auto* d = std::get_if<Discrete>(&dist_)) {
    auto it = std::lower_bound(d->cum.begin(), d->cum.end(), tau);
    const auto j = static_cast<std::size_t>(it - d->cum.begin());
    return d->counts[std::min(j, d->counts.size() - 1)];
  }
  return quantile_by_survival(1.0 - tau);
}

double Demand::quantile_by_survival(double s) const {
  if (!(s > 0.0) || s > 1.0) {
    throw std::invalid_argument("quantile_by_survival: s must lie in (0, 1]");
  }
  return std::visit(
      [s](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          // least count whose tail probability is <= s
          for (std::size_t j = 0; j < d.counts.size(); ++j) {
            if (1.0 - d.cum[j] <= s + 1e-18) return d.counts[j];
          }
          return d.counts.back();
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -std::log(s) / d.rate;
        } else if constexpr (std::is_same_v<T, Weibull>) {
          return d.scale * std::pow(-std::log(s), 1.0 / d.shape);
        } else {
          return std::expm1(-std::log(s) / d.alpha);
        }
      },
      dist_);
}

double Demand::expected_min(double r) const {
  if (!(r >= 0.0)) {
    throw std::invalid_argument("expected_min: r must be >= 0");
  }
  return std::visit(
      [this, r](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          const int j = last_support_at_most(d, std::floor(r));
          if (j < 0) return r;  // all mass above r
          const auto idx = static_cast<std::size_t>(j);
          const double tail = std::max(0.0, 1.0 - d.cum[idx]);
          return d.wsum[idx] + r * tail;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -std::expm1(-d.rate * r) / d.rate;
        } else if constexpr (std::is_same_v<T, Weibull>) {
          if (r >= d.cutoff) return mean_;
          return numeric::adaptive_simpson(
              [&d](double t) { return weibull_survival(d, t); }, 0.0, r,
              tolerances().quadrature_abs);
        } else {
          return -std::expm1((1.0 - d.alpha) * std::log1p(r)) / (d.alpha - 1.0);
        }
      },
      dist_);
}

double Demand::service_prob(double r) const {
  const double q = expected_min(r) / mean_;
  return std::min(1.0, std::max(0.0, q));
}

double Demand::inverse_service_prob(double m) const {
  if (!(m >= 0.0) || m >= 1.0) {
    throw std::invalid_argument("inverse_service_prob: m must lie in [0, 1)");
  }
  if (m == 0.0) return 0.0;
  return inverse_service_by_survival(1.0 - m);
}

double Demand::inverse_service_by_survival(double s) const {
  if (!(s > 0.0) || s > 1.0) {
    throw std::invalid_argument("inverse_service_by_survival: s must lie in (0, 1]");
  }
  if (s == 1.0) return 0.0;
  if (const auto* e = std::get_if<Exponential>(&dist_)) {
    return -std::log(s) / e->rate;
  }
  if (const auto* l = std::get_if<Lomax>(&dist_)) {
    return std::expm1(-std::log(s) / (l->alpha - 1.0));
  }
  // Weibull and Discrete: bisect expected_min(r) >= mean - s * mean.
  const double target = mean_ - s * mean_;
  double hi = is_discrete() ? max_support() : quantile_by_survival(1e-12);
  if (expected_min(hi) < target) return hi;  // saturated at the bracket
  auto res = numeric::bisect_nondecreasing(
      [this](double r) { return expected_min(r); }, target, 0.0, hi,
      tolerances().inverse_q_r, 0.0, tolerances().max_bisect_iterations);
  return res.hi;
}

double Demand::max_support() const {
  const auto* d = std::get_if<Discrete>(&dist_);
  if (d == nullptr) {
    throw std::logic_error("max_support: demand is not discrete");
  }
  return d->counts.back();
}

std::string Demand::describe() const {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Discrete>) {
          std::string s = "discrete{";
          for (std::size_t j = 0; j < d.counts.size(); ++j) {
            if (j) s += ", ";
            s += "(" + numeric::format12(d.counts[j]) + ", " +
                 numeric::format12(d.probs[j]) + ")";
          }
          return s + "}";
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return "exponential{rate=" + numeric::format12(d.rate) + "}";
        } else if constexpr (std::is_same_v<T, Weibull>) {
          return "weibull{shape=" + numeric::format12(d.shape) +
                 ", scale=" + numeric::format12(d.scale) + "}";
        } else {
          return "lomax{alpha=" + numeric::format12(d.alpha) + "}";
        }
      },
      dist_);
}

}  // namespace fairalloc
