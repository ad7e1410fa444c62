#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace fairalloc::numeric {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double m, double b, double fa, double fm,
                    double fb, double whole, double eps, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_step(f, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance eps.
template <class F>
double adaptive_simpson(F f, double a, double b, double eps) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, m, b, fa, fm, fb, whole, eps, 48);
}

struct BisectResult {
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

// Bisect a nondecreasing f for f(x) = target over a bracket with
// f(lo) <= target <= f(hi). Stops when the bracket width drops below
// max(abs_tol, rel_tol * max(1, |hi|)) or after max_iter halvings.
// hi is the "f >= target" side throughout.
template <class F>
BisectResult bisect_nondecreasing(F f, double target, double lo, double hi,
                                  double abs_tol, double rel_tol,
                                  int max_iter) {
  BisectResult out;
  while (out.iterations < max_iter) {
    const double width = hi - lo;
    if (width <= abs_tol || width <= rel_tol * std::fmax(1.0, std::fabs(hi))) {
      break;
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted in doubles
    if (f(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++out.iterations;
  }
  out.lo = lo;
  out.hi = hi;
  return out;
}

// Rounds through a 12-significant-digit decimal representation; reports use
// this so printed numbers and re-parsed numbers agree.
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline std::string format12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace fairalloc::numeric
