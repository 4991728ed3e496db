#include "contest/cost_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "contest/errors.hpp"

namespace contest {
namespace {

void require_quality(double q) {
  if (!(q >= 0.0) || !std::isfinite(q)) {
    throw DomainError("cost model: quality must be a finite value >= 0, got " +
                      std::to_string(q));
  }
}

std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

struct Field {
  std::string_view key;
  double value;
  std::size_t offset;
};

// Parses "k1=v1,k2=v2" starting at `base` in the original text.
std::vector<Field> parse_fields(std::string_view body, std::size_t base) {
  std::vector<Field> fields;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t comma = body.find(',', pos);
    const std::size_t stop = comma == std::string_view::npos ? body.size() : comma;
    const std::string_view item = body.substr(pos, stop - pos);
    const std::size_t eq = item.find('=');
    if (item.empty() || eq == std::string_view::npos || eq == 0) {
      throw ParseError("cost spec: expected key=value", base + pos);
    }
    const std::string_view value = item.substr(eq + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
      throw ParseError("cost spec: malformed number '" + std::string(value) + "'",
                       base + pos + eq + 1);
    }
    fields.push_back({item.substr(0, eq), v, base + pos});
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

double take(std::vector<Field>& fields, std::string_view key, std::size_t family_end) {
  for (auto it = fields.begin(); it != fields.end(); ++it) {
    if (it->key == key) {
      const double v = it->value;
      fields.erase(it);
      for (const auto& f : fields) {
        if (f.key == key) throw ParseError("cost spec: duplicate key '" + std::string(key) + "'", f.offset);
      }
      return v;
    }
  }
  throw ParseError("cost spec: missing key '" + std::string(key) + "'", family_end);
}

}  // namespace

std::string_view to_string(CostFamily family) {
  switch (family) {
    case CostFamily::linear: return "linear";
    case CostFamily::exponential: return "exp";
    case CostFamily::quadratic_plus: return "quad";
  }
  return "?";
}

std::string_view to_string(HazardClass hazard) {
  switch (hazard) {
    case HazardClass::nonincreasing: return "nonincreasing";
    case HazardClass::constant: return "constant";
    case HazardClass::other: return "other";
  }
  return "?";
}

CostModel CostModel::linear(double c0, double slope) {
  if (!(c0 >= 0.0) || !std::isfinite(c0)) throw ValidationError("linear cost: c0 must be >= 0");
  if (!(slope > 0.0) || !std::isfinite(slope)) throw ValidationError("linear cost: slope must be > 0");
  return CostModel(CostFamily::linear, c0, slope, 0.0);
}

CostModel CostModel::exponential(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("exponential cost: k must be > 0");
  return CostModel(CostFamily::exponential, k, 0.0, 0.0);
}

CostModel CostModel::quadratic_plus(double c0, double a, double b) {
  if (!(c0 >= 0.0) || !std::isfinite(c0)) throw ValidationError("quadratic cost: c0 must be >= 0");
  // a > 0 keeps c'(0) > 0; the 1/c' integrands need it.
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("quadratic cost: a must be > 0");
  if (!(b >= 0.0) || !std::isfinite(b)) throw ValidationError("quadratic cost: b must be >= 0");
  return CostModel(CostFamily::quadratic_plus, c0, a, b);
}

CostModel CostModel::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("cost spec: expected '<family>:<params>'", text.size());
  }
  const std::string_view family = text.substr(0, colon);
  auto fields = parse_fields(text.substr(colon + 1), colon + 1);
  std::vector<std::string_view> keys;
  if (family == "linear") {
    keys = {"c0", "slope"};
  } else if (family == "exp") {
    keys = {"k"};
  } else if (family == "quad") {
    keys = {"c0", "a", "b"};
  } else {
    throw ParseError("cost spec: unknown family '" + std::string(family) + "'", 0);
  }
  for (const auto& f : fields) {
    if (std::find(keys.begin(), keys.end(), f.key) == keys.end()) {
      throw ParseError("cost spec: unknown key '" + std::string(f.key) + "'", f.offset);
    }
  }
  std::optional<CostModel> model;
  if (family == "linear") {
    const double c0 = take(fields, "c0", colon);
    const double slope = take(fields, "slope", colon);
    model = linear(c0, slope);
  } else if (family == "exp") {
    const double k = take(fields, "k", colon);
    model = exponential(k);
  } else if (family == "quad") {
    const double c0 = take(fields, "c0", colon);
    const double a = take(fields, "a", colon);
    const double b = take(fields, "b", colon);
    model = quadratic_plus(c0, a, b);
  }
  return *model;
}

std::string CostModel::to_string() const {
  switch (family_) {
    case CostFamily::linear:
      return "linear:c0=" + format_number(params_[0]) + ",slope=" + format_number(params_[1]);
    case CostFamily::exponential:
      return "exp:k=" + format_number(params_[0]);
    case CostFamily::quadratic_plus:
      return "quad:c0=" + format_number(params_[0]) + ",a=" + format_number(params_[1]) +
             ",b=" + format_number(params_[2]);
  }
  return {};
}

double CostModel::eval(double q) const {
  require_quality(q);
  switch (family_) {
    case CostFamily::linear: return params_[0] + params_[1] * q;
    case CostFamily::exponential: return std::exp(params_[0] * q);
    case CostFamily::quadratic_plus: return params_[0] + q * (params_[1] + params_[2] * q);
  }
  return 0.0;
}

double CostModel::derivative(double q) const {
  require_quality(q);
  switch (family_) {
    case CostFamily::linear: return params_[1];
    case CostFamily::exponential: return params_[0] * std::exp(params_[0] * q);
    case CostFamily::quadratic_plus: return params_[1] + 2.0 * params_[2] * q;
  }
  return 0.0;
}

double CostModel::entry_cost() const noexcept {
  return family_ == CostFamily::exponential ? 1.0 : params_[0];
}

double CostModel::inverse(double v) const {
  const double base = entry_cost();
  if (!(v >= base) || !std::isfinite(v)) {
    throw DomainError("cost model: inverse needs v >= c(0) = " + format_number(base) +
                      ", got " + format_number(v));
  }
  switch (family_) {
    case CostFamily::linear: return (v - params_[0]) / params_[1];
    case CostFamily::exponential: return std::log(v) / params_[0];
    case CostFamily::quadratic_plus: {
      // Rationalized root of b q^2 + a q - (v - c0) = 0; no cancellation.
      const double d = v - params_[0];
      return 2.0 * d / (params_[1] + std::sqrt(params_[1] * params_[1] + 4.0 * params_[2] * d));
    }
  }
  return 0.0;
}

HazardClass CostModel::hazard_class() const noexcept {
  switch (family_) {
    case CostFamily::linear:
      return HazardClass::nonincreasing;
    case CostFamily::exponential:
      return HazardClass::constant;
    case CostFamily::quadratic_plus: {
      // sign of (c'/c)' is that of c''c - c'^2 = 2b c0 - a^2 - 2ab q - 2b^2 q^2,
      // which is nonincreasing in q; it rises somewhere iff 2 b c0 > a^2.
      const double c0 = params_[0], a = params_[1], b = params_[2];
      return 2.0 * b * c0 > a * a ? HazardClass::other : HazardClass::nonincreasing;
    }
  }
  return HazardClass::other;
}

double inverse_by_bisection(const CostModel& cost, double v) {
  if (!(v >= cost.entry_cost())) {
    throw DomainError("cost model: inverse needs v >= c(0)");
  }
  double lo = 0.0, hi = 1.0;
  while (cost.eval(hi) < v) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (cost.eval(mid) < v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace contest
