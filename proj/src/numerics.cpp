#include "contest/numerics.hpp"

#include <boost/math/special_functions/binomial.hpp>

#include <algorithm>
#include <cmath>

namespace contest::numerics {

double binomial(unsigned n, unsigned k) {
  if (k > n) return 0.0;
  return boost::math::binomial_coefficient<double>(n, k);
}

double binomial_pmf(unsigned m, unsigned i, double x) {
  if (i > m) return 0.0;
  if (x <= 0.0) return i == 0 ? 1.0 : 0.0;
  if (x >= 1.0) return i == m ? 1.0 : 0.0;
  if (m <= 60) {
    return binomial(m, i) * std::pow(x, i) * std::pow(1.0 - x, m - i);
  }
  const double log_c = std::lgamma(m + 1.0) - std::lgamma(i + 1.0) - std::lgamma(m - i + 1.0);
  return std::exp(log_c + i * std::log(x) + (m - i) * std::log1p(-x));
}

double bernstein(std::span<const double> coef, double x) {
  if (coef.empty()) return 0.0;
  const auto m = static_cast<unsigned>(coef.size() - 1);
  if (x <= 0.0) return coef.front();
  if (x >= 1.0) return coef.back();
  if (m == 0) return coef.front();

  const double ratio = x / (1.0 - x);
  if (m <= 60) {
    // Start from the end with the larger boundary weight so the first term
    // never underflows.
    double sum = 0.0;
    if (x <= 0.5) {
      double t = std::pow(1.0 - x, m);
      for (unsigned i = 0;; ++i) {
        sum += coef[i] * t;
        if (i == m) break;
        t *= ratio * static_cast<double>(m - i) / static_cast<double>(i + 1);
      }
    } else {
      double t = std::pow(x, m);
      for (unsigned i = m;; --i) {
        sum += coef[i] * t;
        if (i == 0) break;
        t *= static_cast<double>(i) / (ratio * static_cast<double>(m - i + 1));
      }
    }
    return sum;
  }

  // Large m: begin at the mode in log space, walk outwards.
  const auto mode = std::min<unsigned>(m, static_cast<unsigned>(std::floor((m + 1) * x)));
  const double t_mode = binomial_pmf(m, mode, x);
  double sum = coef[mode] * t_mode;
  double t = t_mode;
  for (unsigned i = mode; i < m && t > 0.0; ++i) {
    t *= ratio * static_cast<double>(m - i) / static_cast<double>(i + 1);
    sum += coef[i + 1] * t;
  }
  t = t_mode;
  for (unsigned i = mode; i > 0 && t > 0.0; --i) {
    t *= static_cast<double>(i) / (ratio * static_cast<double>(m - i + 1));
    sum += coef[i - 1] * t;
  }
  return sum;
}

}  // namespace contest::numerics
