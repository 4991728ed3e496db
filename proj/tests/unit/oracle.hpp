#pragma once

// Independent reference computations used only by the tests. They share no
// code with the library: plain sums in long double, bisection, Simpson's rule.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

inline long double choose(std::size_t n, std::size_t k) {
  long double r = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / i;
  return r;
}

inline double benefit(const std::vector<double>& a, double x) {
  const std::size_t n = a.size();
  long double s = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    s += a[i] * choose(n - 1, i) * std::pow(static_cast<long double>(x), static_cast<long double>(i)) *
         std::pow(1.0L - x, static_cast<long double>(n - 1 - i));
  }
  return static_cast<double>(s);
}

inline double tail(std::size_t n, std::size_t k, double p) {
  long double s = 0.0L;
  for (std::size_t j = k; j <= n; ++j) {
    s += choose(n, j) * std::pow(static_cast<long double>(p), static_cast<long double>(j)) *
         std::pow(1.0L - p, static_cast<long double>(n - j));
  }
  return static_cast<double>(s);
}

inline double budget(const std::vector<double>& a, double p) {
  double b = 0.0;
  for (std::size_t k = 1; k <= a.size(); ++k) b += a[k - 1] * tail(a.size(), k, p);
  return b;
}

// Root of a nonincreasing g on [lo, hi] with g(lo) >= target >= g(hi).
inline double bisect(const std::function<double(double)>& g, double target, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) >= target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int m = 4000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Equilibrium from first principles for a generic increasing cost.
struct Equilibrium {
  std::vector<double> a;
  std::function<double(double)> cost;
  double p = 0.0;
  double shift = 0.0;
  double qbar = 0.0;

  Equilibrium(std::vector<double> rewards, std::function<double(double)> c)
      : a(std::move(rewards)), cost(std::move(c)) {
    const double c0 = cost(0.0);
    if (a.front() <= c0) return;
    if (a.back() >= c0) {
      p = 1.0;
      shift = a.back() - c0;
    } else {
      p = bisect([&](double x) { return benefit(a, x); }, c0, 0.0, 1.0);
    }
    const double top = a.front() - shift;
    double hi = 1.0;
    while (cost(hi) < top) hi *= 2.0;
    qbar = bisect([&](double q) { return -cost(q); }, -top, 0.0, hi);
  }

  // x(q) = p (1 - G(q)).
  double pressure(double q) const {
    if (q >= qbar) return 0.0;
    return bisect([&](double x) { return benefit(a, x); }, cost(q) + shift, 0.0, p);
  }
  double cdf(double q) const { return 1.0 - pressure(q) / p; }
  // q = qbar sin^2(pi t / 2) flattens square-root behaviour at either end.
  double over_support(const std::function<double(double)>& f) const {
    const double half_pi = 2.0 * std::atan(1.0);
    return simpson(
        [&](double t) {
          const double s = std::sin(half_pi * t), c = std::cos(half_pi * t);
          return f(qbar * s * s) * 2.0 * half_pi * qbar * s * c;
        },
        0.0, 1.0);
  }
  double eq_max() const {
    const double n = static_cast<double>(a.size());
    return over_support([&](double q) { return 1.0 - std::pow(1.0 - pressure(q), n); });
  }
  double eq_avg() const {
    return over_support([&](double q) { return pressure(q); });
  }
};

}  // namespace oracle
