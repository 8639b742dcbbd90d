#include "pooltest/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace pooltest {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

double as_double(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  return j.get<double>();
}

std::size_t as_index(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    throw InputError(std::string(what) + " must be a positive integer");
  }
  return static_cast<std::size_t>(j.get<long long>());
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& items) {
  std::vector<std::size_t> out(items);
  for (auto& i : out) ++i;
  return out;
}

std::vector<std::size_t> zero_based_list(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<std::size_t> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(as_index(v, what) - 1);
  return out;
}

}  // namespace

json to_json_value(const ProbabilityVector& pv) {
  json j;
  j["p"] = std::vector<double>(pv.probs().begin(), pv.probs().end());
  if (pv.has_ids()) j["ids"] = pv.ids();
  return j;
}

json to_json_value(const OrderedPartition& plan) {
  return json{{"ordered_sizes",
               std::vector<std::size_t>(plan.sizes().begin(), plan.sizes().end())}};
}

json to_json_value(const SetPartition& plan) {
  json blocks = json::array();
  for (const auto& block : plan.blocks()) blocks.push_back(one_based(block));
  return json{{"blocks", blocks}};
}

json to_json_value(const Plan& plan) {
  return std::visit([](const auto& p) { return to_json_value(p); }, plan);
}

json to_json_value(const CostReport& report) {
  json blocks = json::array();
  for (const auto& b : report.per_block) {
    blocks.push_back({{"block", one_based(b.block)},
                      {"order", one_based(b.order)},
                      {"expected_tests", b.expected_tests}});
  }
  return json{{"procedure", std::string(to_string(report.procedure))},
              {"blocks", blocks},
              {"total", report.total}};
}

json to_json_value(const SimulationSummary& s) {
  return json{{"procedure", std::string(to_string(s.procedure))},
              {"plan", to_json_value(s.plan)},
              {"replicates", s.replicates},
              {"mean_tests", s.mean_tests},
              {"std_error", s.std_error},
              {"seed", s.seed}};
}

ProbabilityVector probability_vector_from_json(const json& j) {
  const json& p = require(j, "p");
  if (!p.is_array()) throw InputError("field 'p' must be an array");
  std::vector<double> probs;
  probs.reserve(p.size());
  for (const auto& v : p) probs.push_back(as_double(v, "probability"));
  std::vector<std::string> ids;
  if (j.contains("ids")) {
    const json& raw_ids = j.at("ids");
    if (!raw_ids.is_array()) throw InputError("field 'ids' must be an array");
    for (const auto& v : raw_ids) {
      if (!v.is_string()) throw InputError("ids must be strings");
      ids.push_back(v.get<std::string>());
    }
  }
  return ProbabilityVector::validate(probs, std::move(ids));
}

Plan plan_from_json(const json& j) {
  if (j.is_object() && j.contains("ordered_sizes")) {
    if (j.contains("blocks")) {
      throw InputError("plan has both 'ordered_sizes' and 'blocks'");
    }
    const json& raw = j.at("ordered_sizes");
    if (!raw.is_array()) throw InputError("'ordered_sizes' must be an array");
    std::vector<std::size_t> sizes;
    std::size_t n = 0;
    for (const auto& v : raw) {
      sizes.push_back(as_index(v, "block size"));
      n += sizes.back();
    }
    return OrderedPartition::make(std::move(sizes), n);
  }
  if (j.is_object() && j.contains("blocks")) {
    const json& raw = j.at("blocks");
    if (!raw.is_array()) throw InputError("'blocks' must be an array");
    std::vector<std::vector<std::size_t>> blocks;
    std::size_t n = 0;
    for (const auto& b : raw) {
      blocks.push_back(zero_based_list(b, "block item"));
      n += blocks.back().size();
    }
    return SetPartition::make(std::move(blocks), n);
  }
  throw InputError("plan must have 'ordered_sizes' or 'blocks'");
}

CostReport cost_report_from_json(const json& j) {
  CostReport report;
  const json& proc = require(j, "procedure");
  if (!proc.is_string()) throw InputError("'procedure' must be a string");
  report.procedure = parse_procedure(proc.get<std::string>());
  const json& blocks = require(j, "blocks");
  if (!blocks.is_array()) throw InputError("'blocks' must be an array");
  for (const auto& b : blocks) {
    BlockCost bc;
    bc.block = zero_based_list(require(b, "block"), "block item");
    bc.order = zero_based_list(require(b, "order"), "order item");
    bc.expected_tests = as_double(require(b, "expected_tests"), "expected_tests");
    report.per_block.push_back(std::move(bc));
  }
  report.total = as_double(require(j, "total"), "total");
  return report;
}

SimulationSummary simulation_summary_from_json(const json& j) {
  SimulationSummary s;
  const json& proc = require(j, "procedure");
  if (!proc.is_string()) throw InputError("'procedure' must be a string");
  s.procedure = parse_procedure(proc.get<std::string>());
  s.plan = plan_from_json(require(j, "plan"));
  const json& reps = require(j, "replicates");
  if (!reps.is_number_unsigned()) throw InputError("'replicates' must be a positive integer");
  s.replicates = reps.get<std::uint64_t>();
  s.mean_tests = as_double(require(j, "mean_tests"), "mean_tests");
  s.std_error = as_double(require(j, "std_error"), "std_error");
  const json& seed = require(j, "seed");
  if (!seed.is_number_unsigned()) throw InputError("'seed' must be an unsigned integer");
  s.seed = seed.get<std::uint64_t>();
  return s;
}

double round_significant(double value, int digits) {
  if (!std::isfinite(value)) return value;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return std::strtod(buf, nullptr);
}

}  // namespace pooltest
