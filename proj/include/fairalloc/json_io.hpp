#pragma once

#include <string>

#include <json.hpp>

#include "fairalloc/generators.hpp"
#include "fairalloc/instance.hpp"
#include "fairalloc/metrics.hpp"
#include "fairalloc/oracles.hpp"
#include "fairalloc/solvers.hpp"

namespace fairalloc {

// Scenario file schema:
//   {"budget": 2, "mode": "integer"|"fractional",
//    "groups": [{"name": "A", "distribution": <demand>}]}
// with <demand> one of
//   {"type":"discrete","support":[[0,0.6],[2,0.4]]}
//   {"type":"exponential","rate":1.0}
//   {"type":"weibull","shape":2.0,"scale":1.0}
//   {"type":"lomax","alpha":2.5}
// Parse failures throw std::invalid_argument naming the offending field.

nlohmann::json demand_to_json(const Demand& demand);
Demand demand_from_json(const nlohmann::json& j, const std::string& context);

nlohmann::json scenario_to_json(const Instance& inst);
Instance scenario_from_json(const nlohmann::json& j);
Instance load_scenario(const std::string& path);

// Report serializers. All numbers pass through 12-significant-digit
// rounding so output is reproducible and re-parseable.
nlohmann::json solve_report_to_json(const Instance& inst,
                                    const SolveReport& report);
std::string solve_report_to_csv(const Instance& inst,
                                const SolveReport& report);

nlohmann::json pof_report_to_json(const PofReport& report);
std::string pof_report_to_csv(const PofReport& report);

nlohmann::json monte_carlo_to_json(const Instance& inst,
                                   const MonteCarloResult& result);
std::string monte_carlo_to_csv(const Instance& inst,
                               const MonteCarloResult& result);

// Scenario JSON plus a "meta" object carrying the construction parameters
// and the predicted/measured PoF; still loadable as a plain scenario.
nlohmann::json adversarial_to_json(const AdversarialResult& result,
                                   double measured);

}  // namespace fairalloc
