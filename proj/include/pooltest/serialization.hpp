#pragma once

// JSON interchange form for the model types.
//
//   ProbabilityVector   {"p": [...], "ids": [...]}        ("ids" optional)
//   OrderedPartition    {"ordered_sizes": [...]}
//   SetPartition        {"blocks": [[1,3],[2,4]]}         (1-based indices)
//   CostReport          {"procedure": "S", "blocks": [...], "total": x}
//   SimulationSummary   {"procedure", "plan", "replicates", "mean_tests",
//                        "std_error", "seed"}
//
// Parsing a plan needs the population size; it is read from the plan itself
// (sum of sizes / union of blocks), so plans validate standalone.

#include <json.hpp>

#include "pooltest/model.hpp"

namespace pooltest {

nlohmann::json to_json_value(const ProbabilityVector& pv);
nlohmann::json to_json_value(const OrderedPartition& plan);
nlohmann::json to_json_value(const SetPartition& plan);
nlohmann::json to_json_value(const Plan& plan);
nlohmann::json to_json_value(const CostReport& report);
nlohmann::json to_json_value(const SimulationSummary& summary);

/// All parsers throw InputError on schema violations.
ProbabilityVector probability_vector_from_json(const nlohmann::json& j);
Plan plan_from_json(const nlohmann::json& j);
CostReport cost_report_from_json(const nlohmann::json& j);
SimulationSummary simulation_summary_from_json(const nlohmann::json& j);

/// Rounds to `digits` significant digits, the precision used for CLI output.
double round_significant(double value, int digits = 10);

}  // namespace pooltest
