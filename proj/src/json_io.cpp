#include "fairalloc/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fairalloc/numeric.hpp"

namespace fairalloc {

namespace {

using nlohmann::json;

using numeric::format12;
using numeric::round12;

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw std::invalid_argument(context + ": " + what);
}

const json& require_key(const json& j, const std::string& key,
                        const std::string& context) {
  if (!j.is_object()) fail(context, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(context + "." + key, "missing");
  return *it;
}

double require_number(const json& j, const std::string& key,
                      const std::string& context) {
  const json& v = require_key(j, key, context);
  if (!v.is_number()) fail(context + "." + key, "expected a number");
  return v.get<double>();
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& context) {
  const json& v = require_key(j, key, context);
  if (!v.is_string()) fail(context + "." + key, "expected a string");
  return v.get<std::string>();
}

json q_values_json(const ServiceProfile& profile) {
  json arr = json::array();
  for (double q : profile.q_values) arr.push_back(round12(q));
  return arr;
}

}  // namespace

nlohmann::json demand_to_json(const Demand& demand) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Demand::Discrete>) {
          json support = json::array();
          for (std::size_t j = 0; j < d.counts.size(); ++j) {
            support.push_back({d.counts[j], round12(d.probs[j])});
          }
          return {{"type", "discrete"}, {"support", support}};
        } else if constexpr (std::is_same_v<T, Demand::Exponential>) {
          return {{"type", "exponential"}, {"rate", round12(d.rate)}};
        } else if constexpr (std::is_same_v<T, Demand::Weibull>) {
          return {{"type", "weibull"},
                  {"shape", round12(d.shape)},
                  {"scale", round12(d.scale)}};
        } else {
          return {{"type", "lomax"}, {"alpha", round12(d.alpha)}};
        }
      },
      demand.dist());
}

Demand demand_from_json(const nlohmann::json& j, const std::string& context) {
  const std::string type = require_string(j, "type", context);
  try {
    if (type == "discrete") {
      const json& support = require_key(j, "support", context);
      if (!support.is_array() || support.empty()) {
        fail(context + ".support", "expected a non-empty array of [count, prob] pairs");
      }
      std::vector<std::pair<double, double>> points;
      for (std::size_t i = 0; i < support.size(); ++i) {
        const json& pair = support[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
            !pair[1].is_number()) {
          fail(context + ".support[" + std::to_string(i) + "]",
               "expected a [count, prob] pair");
        }
        points.emplace_back(pair[0].get<double>(), pair[1].get<double>());
      }
      return Demand::discrete(points);
    }
    if (type == "exponential") {
      return Demand::exponential(require_number(j, "rate", context));
    }
    if (type == "weibull") {
      return Demand::weibull(require_number(j, "shape", context),
                             require_number(j, "scale", context));
    }
    if (type == "lomax") {
      return Demand::lomax(require_number(j, "alpha", context));
    }
  } catch (const std::invalid_argument& e) {
    // Re-root constructor diagnostics at the field path.
    std::string what = e.what();
    if (what.rfind(context, 0) == 0) throw;
    fail(context, what);
  }
  fail(context + ".type", "unknown distribution type '" + type + "'");
}

nlohmann::json scenario_to_json(const Instance& inst) {
  json groups = json::array();
  for (const auto& g : inst.groups) {
    groups.push_back({{"name", g.name}, {"distribution", demand_to_json(g.demand)}});
  }
  return {{"budget", round12(inst.budget)},
          {"mode", inst.mode == AllocationMode::kInteger ? "integer" : "fractional"},
          {"groups", groups}};
}

Instance scenario_from_json(const nlohmann::json& j) {
  const double budget = require_number(j, "budget", "scenario");
  const std::string mode_str = require_string(j, "mode", "scenario");
  AllocationMode mode;
  if (mode_str == "integer") {
    mode = AllocationMode::kInteger;
  } else if (mode_str == "fractional") {
    mode = AllocationMode::kFractional;
  } else {
    fail("scenario.mode", "expected \"integer\" or \"fractional\"");
  }
  const json& groups = require_key(j, "groups", "scenario");
  if (!groups.is_array() || groups.empty()) {
    fail("scenario.groups", "expected a non-empty array");
  }
  std::vector<Group> parsed;
  parsed.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::string context = "scenario.groups[" + std::to_string(i) + "]";
    const json& g = groups[i];
    const std::string name = require_string(g, "name", context);
    parsed.push_back(
        {name, demand_from_json(require_key(g, "distribution", context),
                                context + ".distribution")});
  }
  Instance inst = make_instance(std::move(parsed), budget, mode);
  return inst;
}

Instance load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open scenario file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

nlohmann::json solve_report_to_json(const Instance& inst,
                                    const SolveReport& report) {
  json names = json::array();
  json alloc = json::array();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    names.push_back(inst.groups[i].name);
    alloc.push_back(round12(report.allocation.amounts[i]));
  }
  json out = {{"groups", names},
              {"allocation", alloc},
              {"utilization", round12(report.utilization)},
              {"q_values", q_values_json(report.profile)},
              {"gap", round12(report.profile.gap)},
              {"iterations", report.iterations},
              {"residual", round12(report.residual)}};
  out["level"] = report.level ? json(round12(*report.level)) : json();
  return out;
}

std::string solve_report_to_csv(const Instance& inst,
                                const SolveReport& report) {
  std::ostringstream out;
  out << "name,allocation,q,utilization,gap,level,residual\n";
  for (std::size_t i = 0; i < inst.size(); ++i) {
    out << inst.groups[i].name << ','
        << format12(report.allocation.amounts[i]) << ','
        << format12(report.profile.q_values[i]) << ",,,,\n";
  }
  out << "TOTAL," << format12(report.allocation.total()) << ",,"
      << format12(report.utilization) << ',' << format12(report.profile.gap)
      << ',' << (report.level ? format12(*report.level) : std::string()) << ','
      << format12(report.residual) << '\n';
  return out.str();
}

nlohmann::json pof_report_to_json(const PofReport& report) {
  json out = {{"u_max", round12(report.u_max)},
              {"u_fair", round12(report.u_fair)},
              {"epsilon", round12(report.epsilon)},
              {"pof_infinite", report.pof_infinite},
              {"bound_satisfied", report.bound_satisfied}};
  out["pof"] = report.pof_infinite ? json() : json(round12(report.pof));
  out["bound_inverse_eps"] =
      report.bound_inverse_eps ? json(round12(*report.bound_inverse_eps)) : json();
  out["bound_powerlaw"] =
      report.bound_powerlaw ? json(round12(*report.bound_powerlaw)) : json();
  return out;
}

std::string pof_report_to_csv(const PofReport& report) {
  std::ostringstream out;
  out << "u_max,u_fair,pof,epsilon,bound_inverse_eps,bound_powerlaw,bound_satisfied\n";
  out << format12(report.u_max) << ',' << format12(report.u_fair) << ','
      << (report.pof_infinite ? "inf" : format12(report.pof)) << ','
      << format12(report.epsilon) << ','
      << (report.bound_inverse_eps ? format12(*report.bound_inverse_eps)
                                   : std::string())
      << ','
      << (report.bound_powerlaw ? format12(*report.bound_powerlaw)
                                : std::string())
      << ',' << (report.bound_satisfied ? "true" : "false") << '\n';
  return out.str();
}

nlohmann::json monte_carlo_to_json(const Instance& inst,
                                   const MonteCarloResult& result) {
  json names = json::array();
  json qs = json::array();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    names.push_back(inst.groups[i].name);
    qs.push_back(round12(result.q_estimates[i]));
  }
  return {{"groups", names},
          {"utilization_estimate", round12(result.util_estimate)},
          {"utilization_stderr", round12(result.util_stderr)},
          {"q_estimates", qs},
          {"reps", result.reps},
          {"seed", result.seed}};
}

std::string monte_carlo_to_csv(const Instance& inst,
                               const MonteCarloResult& result) {
  std::ostringstream out;
  out << "name,q_estimate,utilization_estimate,utilization_stderr,reps,seed\n";
  for (std::size_t i = 0; i < inst.size(); ++i) {
    out << inst.groups[i].name << ',' << format12(result.q_estimates[i])
        << ",,,,\n";
  }
  out << "TOTAL,," << format12(result.util_estimate) << ','
      << format12(result.util_stderr) << ',' << result.reps << ','
      << result.seed << '\n';
  return out.str();
}

nlohmann::json adversarial_to_json(const AdversarialResult& result,
                                   double measured) {
  json scenario = scenario_to_json(result.instance);
  json params = json::object();
  for (const auto& [key, value] : result.construction_params) {
    params[key] = round12(value);
  }
  json meta = {{"kind", result.kind},
               {"pof_lower_bound", round12(result.pof_lower_bound)},
               {"predicted_pof", round12(result.predicted_pof)},
               {"measured_pof", round12(measured)},
               {"params", params}};
  if (result.kind == "discrete") {
    meta["epsilon"] = round12(result.epsilon);
  }
  scenario["meta"] = meta;
  return scenario;
}

}  // namespace fairalloc
