#pragma once

#include <string>
#include <string_view>

namespace contest {

enum class CostFamily { linear, exponential, quadratic_plus };

// Monotonicity of the ratio c'(q) / c(q) on q >= 0.
enum class HazardClass { nonincreasing, constant, other };

std::string_view to_string(CostFamily family);
std::string_view to_string(HazardClass hazard);

// Strictly increasing effort cost c(q) on q >= 0.
//
//   linear          c(q) = c0 + slope * q
//   exponential     c(q) = exp(k * q)
//   quadratic_plus  c(q) = c0 + a * q + b * q^2
//
// Text form: "linear:c0=0.25,slope=1", "exp:k=1", "quad:c0=0.1,a=1,b=2".
class CostModel {
 public:
  static CostModel linear(double c0, double slope);
  static CostModel exponential(double k);
  static CostModel quadratic_plus(double c0, double a, double b);

  // Throws ParseError with the byte offset of the offending token.
  static CostModel parse(std::string_view text);
  // Shortest round-tripping text form.
  std::string to_string() const;

  CostFamily family() const noexcept { return family_; }
  // Family parameters: linear (c0, slope, -), exponential (k, -, -),
  // quadratic_plus (c0, a, b).
  double param(int i) const noexcept { return params_[i]; }

  double eval(double q) const;
  double derivative(double q) const;
  double inverse(double v) const;
  HazardClass hazard_class() const noexcept;

  // c(0), the cost of entering with the lowest quality.
  double entry_cost() const noexcept;
  // Endogenous entry needs c(0) > 0; a zero entry cost is admitted but flagged.
  bool has_entry_cost() const noexcept { return entry_cost() > 0.0; }

  friend bool operator==(const CostModel&, const CostModel&) = default;

 private:
  CostModel(CostFamily family, double p0, double p1, double p2)
      : family_(family), params_{p0, p1, p2} {}

  CostFamily family_;
  double params_[3];
};

// Generic numeric inverse: bracket [0, 1], double the upper end until
// c(hi) >= v, then bisect. Works for any family and serves as an oracle for
// the closed forms.
double inverse_by_bisection(const CostModel& cost, double v);

}  // namespace contest
