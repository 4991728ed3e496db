#include "cli/instance.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "contest/errors.hpp"

namespace contest::cli {
namespace {

using nlohmann::json;

double number_field(const json& value, const std::string& field) {
  if (!value.is_number()) throw ValidationError("config field '" + field + "': expected a number");
  return value.get<double>();
}

std::size_t count_field(const json& value, const std::string& field) {
  if (!value.is_number_unsigned()) {
    throw ValidationError("config field '" + field + "': expected a nonnegative integer");
  }
  return value.get<std::size_t>();
}

std::string string_field(const json& value, const std::string& field) {
  if (!value.is_string()) throw ValidationError("config field '" + field + "': expected a string");
  return value.get<std::string>();
}

std::vector<double> list_field(const json& value, const std::string& field) {
  if (!value.is_array()) throw ValidationError("config field '" + field + "': expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(number_field(value[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void reject_unknown(const json& object, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) known = known || it.key() == key;
    if (!known) throw UsageError(where + ": unknown key '" + it.key() + "'");
  }
}

int constructor_count(const InstanceInput& in) {
  return static_cast<int>(in.rewards.has_value()) + static_cast<int>(in.wta.has_value()) +
         static_cast<int>(in.caps.has_value());
}

template <class T>
void take(std::optional<T>& into, const std::optional<T>& from) {
  if (from) into = from;
}

}  // namespace

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::size_t stop = comma == std::string::npos ? text.size() : comma;
    double v = 0.0;
    const char* first = text.data() + pos;
    const char* last = text.data() + stop;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (first == last || ec != std::errc() || ptr != last) {
      throw ParseError(flag + ": malformed number '" + text.substr(pos, stop - pos) + "'", pos);
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

InstanceInput parse_config_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ValidationError(origin + ": line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": malformed JSON");
  }
  if (!doc.is_object()) throw ValidationError(origin + ": top level must be an object");
  reject_unknown(doc, {"n", "rewards", "wta", "caps", "tax", "cost", "solver", "quadrature", "seed", "trials"},
                 origin);

  InstanceInput in;
  if (doc.contains("n")) in.n = count_field(doc["n"], "n");
  if (doc.contains("rewards")) in.rewards = list_field(doc["rewards"], "rewards");
  if (doc.contains("wta")) in.wta = number_field(doc["wta"], "wta");
  if (doc.contains("caps")) in.caps = list_field(doc["caps"], "caps");
  if (doc.contains("tax")) in.tax = number_field(doc["tax"], "tax");
  if (doc.contains("cost")) in.cost = string_field(doc["cost"], "cost");
  if (doc.contains("seed")) in.seed = count_field(doc["seed"], "seed");
  if (doc.contains("trials")) in.trials = count_field(doc["trials"], "trials");
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    if (!s.is_object()) throw ValidationError("config field 'solver': expected an object");
    reject_unknown(s, {"arg_tolerance", "residual_tolerance", "grid_nodes"}, origin + ": solver");
    if (s.contains("arg_tolerance")) in.arg_tolerance = number_field(s["arg_tolerance"], "solver.arg_tolerance");
    if (s.contains("residual_tolerance")) {
      in.residual_tolerance = number_field(s["residual_tolerance"], "solver.residual_tolerance");
    }
    if (s.contains("grid_nodes")) in.grid_nodes = count_field(s["grid_nodes"], "solver.grid_nodes");
  }
  if (doc.contains("quadrature")) {
    const json& q = doc["quadrature"];
    if (!q.is_object()) throw ValidationError("config field 'quadrature': expected an object");
    reject_unknown(q, {"panels", "tolerance", "max_panels", "path"}, origin + ": quadrature");
    if (q.contains("panels")) in.panels = count_field(q["panels"], "quadrature.panels");
    if (q.contains("tolerance")) in.quad_tolerance = number_field(q["tolerance"], "quadrature.tolerance");
    if (q.contains("max_panels")) in.max_panels = count_field(q["max_panels"], "quadrature.max_panels");
    if (q.contains("path")) in.path = string_field(q["path"], "quadrature.path");
  }
  if (constructor_count(in) > 1) {
    throw UsageError(origin + ": give only one of 'rewards', 'wta', 'caps'");
  }
  return in;
}

InstanceInput load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str(), path);
}

InstanceInput merge(const InstanceInput& file, const InstanceInput& flags) {
  InstanceInput out = file;
  if (constructor_count(flags) > 0) {
    out.rewards.reset();
    out.wta.reset();
    out.caps.reset();
    out.tax.reset();
  }
  take(out.n, flags.n);
  take(out.rewards, flags.rewards);
  take(out.wta, flags.wta);
  take(out.caps, flags.caps);
  take(out.tax, flags.tax);
  take(out.cost, flags.cost);
  take(out.arg_tolerance, flags.arg_tolerance);
  take(out.residual_tolerance, flags.residual_tolerance);
  take(out.grid_nodes, flags.grid_nodes);
  take(out.panels, flags.panels);
  take(out.quad_tolerance, flags.quad_tolerance);
  take(out.max_panels, flags.max_panels);
  take(out.path, flags.path);
  take(out.seed, flags.seed);
  take(out.trials, flags.trials);
  return out;
}

InstanceSpec resolve(const InstanceInput& in, bool need_schedule) {
  if (constructor_count(in) > 1) {
    throw UsageError("conflicting reward constructors: give only one of --rewards, --wta, --caps");
  }
  if (constructor_count(in) == 0 && (need_schedule || !in.n)) {
    throw UsageError(need_schedule ? "no reward schedule: give --rewards, --wta or --caps"
                                   : "give --n or a reward schedule");
  }
  if (in.tax && !in.wta) throw UsageError("--tax requires the --wta constructor");
  if (!in.cost) throw UsageError("no cost model: give --cost");

  InstanceSpec spec;
  spec.cost = CostModel::parse(*in.cost);
  if (in.rewards) {
    spec.constructor = Constructor::rewards;
    spec.rewards_input = *in.rewards;
    spec.n = in.rewards->size();
  } else if (in.wta) {
    spec.constructor = Constructor::wta;
    if (!in.n) throw UsageError("--wta needs --n");
    spec.prize = *in.wta;
    spec.tax = in.tax.value_or(0.0);
    spec.n = *in.n;
  } else if (in.caps) {
    spec.constructor = Constructor::attention;
    spec.caps = *in.caps;
    spec.n = in.caps->size();
  } else {
    spec.constructor = Constructor::none;
    spec.n = *in.n;
    if (spec.n < 2) throw ValidationError("n must be >= 2");
  }
  if (in.n && *in.n != spec.n) {
    throw ValidationError("n = " + std::to_string(*in.n) + " does not match the " +
                          std::to_string(spec.n) + " listed values");
  }
  if (in.arg_tolerance) spec.solver.arg_tolerance = *in.arg_tolerance;
  if (in.residual_tolerance) spec.solver.residual_tolerance = *in.residual_tolerance;
  if (in.grid_nodes) spec.solver.grid_nodes = *in.grid_nodes;
  if (in.panels) spec.metrics.quadrature.panels = *in.panels;
  if (in.quad_tolerance) spec.metrics.quadrature.tolerance = *in.quad_tolerance;
  if (in.max_panels) spec.metrics.quadrature.max_panels = *in.max_panels;
  if (in.path) {
    if (*in.path == "direct") {
      spec.metrics.path = QualityPath::direct;
    } else if (*in.path == "substitution") {
      spec.metrics.path = QualityPath::substitution;
    } else {
      throw ValidationError("quadrature path must be 'direct' or 'substitution', got '" + *in.path + "'");
    }
  }
  if (!(spec.solver.arg_tolerance > 0.0) || !(spec.solver.residual_tolerance > 0.0)) {
    throw ValidationError("solver tolerances must be > 0");
  }
  if (spec.metrics.quadrature.panels == 0) throw ValidationError("quadrature panels must be >= 1");
  if (in.seed) spec.seed = *in.seed;
  if (in.trials) spec.trials = *in.trials;
  if (spec.trials == 0) throw ValidationError("trials must be >= 1");
  // surface schedule errors at parse time
  if (spec.has_schedule()) (void)spec.build_rewards();
  return spec;
}

RewardVector InstanceSpec::build_rewards() const {
  switch (constructor) {
    case Constructor::rewards:
      return RewardVector::validate(rewards_input);
    case Constructor::wta:
      return tax > 0.0 ? taxed_wta(n, prize, tax, cost) : winner_take_all(n, prize);
    case Constructor::attention:
      return attention_schedule(AttentionCaps::validate(caps), cost.entry_cost());
    case Constructor::none:
      break;
  }
  throw StateError("instance has no reward schedule");
}

nlohmann::json InstanceSpec::echo() const {
  json out;
  out["n"] = n;
  switch (constructor) {
    case Constructor::rewards:
      out["rewards"] = rewards_input;
      break;
    case Constructor::wta:
      out["wta"] = prize;
      out["tax"] = tax;
      break;
    case Constructor::attention:
      out["caps"] = caps;
      break;
    case Constructor::none:
      break;
  }
  out["cost"] = cost.to_string();
  out["solver"] = {{"arg_tolerance", solver.arg_tolerance},
                   {"residual_tolerance", solver.residual_tolerance},
                   {"grid_nodes", solver.grid_nodes}};
  out["quadrature"] = {{"panels", metrics.quadrature.panels},
                       {"tolerance", metrics.quadrature.tolerance},
                       {"max_panels", metrics.quadrature.max_panels},
                       {"path", std::string(to_string(metrics.path))}};
  out["seed"] = seed;
  out["trials"] = trials;
  return out;
}

}  // namespace contest::cli
