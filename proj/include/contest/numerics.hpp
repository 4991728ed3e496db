#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <span>

#include "contest/errors.hpp"

namespace contest::numerics {

// C(n, k) as a double.
double binomial(unsigned n, unsigned k);

// C(m, i) x^i (1-x)^(m-i).
double binomial_pmf(unsigned m, unsigned i, double x);

// Bernstein-form polynomial sum_i coef[i] C(m, i) x^i (1-x)^(m-i) with
// m = coef.size() - 1. Terms are generated by the ratio recurrence from the
// heavier end for m <= 60 and from the mode in log space above that.
double bernstein(std::span<const double> coef, double x);

// Root of f(x) = target on [lo, hi] for a nonincreasing f, by bisection.
// Stops when the bracket is narrower than arg_tol or cannot be split further.
template <class F>
double bisect_decreasing(F&& f, double target, double lo, double hi,
                         double arg_tol = 0.0, int max_iter = 400) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi || hi - lo <= arg_tol) break;
    if (f(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

// Root of a nondecreasing f on [floor, inf). Secant steps from (x0, x1); a
// step that leaves the current bracket is replaced by bisection (or by an
// expansion while no upper bracket is known). Throws ValidationError if
// f(floor) > 0, i.e. the root lies below the floor, and ConvergenceError when
// max_iter is exhausted.
template <class F>
double secant_increasing(F&& f, double floor, double x0, double x1, double f_tol,
                         int max_iter = 100) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double lo = floor, hi = std::numeric_limits<double>::infinity();
  bool lo_known = false;
  auto record = [&](double x, double fx) {
    if (fx < 0.0) {
      if (x >= lo) {
        lo = x;
        lo_known = true;
      }
    } else if (x <= hi) {
      hi = x;
    }
  };
  auto eval = [&](double x) {
    const double fx = f(x);
    if (x == floor && fx > 0.0) throw ValidationError("root lies below the admissible floor");
    record(x, fx);
    return fx;
  };
  x0 = std::max(x0, floor);
  x1 = std::max(x1, floor);
  if (x1 == x0) x1 = x0 + std::max(1e-3 * std::abs(x0), 1e-6);
  double f0 = eval(x0);
  if (std::abs(f0) <= f_tol) return x0;
  double f1 = eval(x1);
  double best = x1, best_f = std::abs(f1);
  if (std::abs(f0) < best_f) best = x0, best_f = std::abs(f0);
  for (int it = 0; it < max_iter; ++it) {
    if (best_f <= f_tol) return best;
    const bool hi_known = std::isfinite(hi);
    if (lo_known && hi_known && hi - lo <= 4.0 * eps * std::max(std::abs(hi), 1.0)) return best;
    double x2 = f1 != f0 ? x1 - f1 * (x1 - x0) / (f1 - f0)
                         : std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(x2) || x2 <= lo || x2 >= hi) {
      if (lo_known && hi_known) {
        x2 = 0.5 * (lo + hi);
      } else if (!hi_known) {
        const double from = std::max(x0, x1);
        x2 = from + 2.0 * std::max({std::abs(x1 - x0), 1e-3 * std::abs(from), 1e-6});
      } else {
        x2 = floor;
      }
    }
    const double f2 = eval(x2);
    if (std::abs(f2) < best_f) best = x2, best_f = std::abs(f2);
    x0 = x1, f0 = f1;
    x1 = x2, f1 = f2;
  }
  if (best_f <= f_tol) return best;
  throw ConvergenceError("secant iteration did not converge", best_f);
}

struct QuadratureSettings {
  std::size_t panels = 64;         // initial composite panel count
  double tolerance = 1e-9;         // refine until successive estimates agree;
                                   // <= 0 evaluates the initial rule only
  std::size_t max_panels = 16384;  // node budget
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
};

// Composite 8-point Gauss-Legendre rule on `panels` equal panels.
template <class F>
double gauss_legendre(F&& f, double a, double b, std::size_t panels) {
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const double h = (b - a) / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + h * static_cast<double>(i);
    sum += Rule::integrate(f, lo, i + 1 == panels ? b : lo + h);
  }
  return sum;
}

// Doubles the panel count until two successive composite estimates differ by
// less than the tolerance. Panels are reduced in fixed order so the result is
// bit-stable.
template <class F>
QuadratureResult integrate(F&& f, double a, double b,
                           const QuadratureSettings& settings = {}) {
  if (!(b > a)) return {0.0, 0.0, 0};
  std::size_t panels = settings.panels == 0 ? 1 : settings.panels;
  double previous = gauss_legendre(f, a, b, panels);
  if (settings.tolerance <= 0.0) return {previous, 0.0, panels};
  double diff = std::abs(previous);
  while (panels * 2 <= settings.max_panels) {
    panels *= 2;
    const double current = gauss_legendre(f, a, b, panels);
    diff = std::abs(current - previous);
    if (diff < settings.tolerance) return {current, diff, panels};
    previous = current;
  }
  throw ConvergenceError("quadrature did not converge within the node budget",
                         diff);
}

}  // namespace contest::numerics
