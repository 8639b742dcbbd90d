#include "pooltest/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pooltest/bounds.hpp"
#include "pooltest/cost.hpp"
#include "pooltest/optimize.hpp"
#include "pooltest/serialization.hpp"
#include "pooltest/simulate.hpp"
#include "pooltest/study.hpp"

namespace pooltest::cli {

using nlohmann::json;

namespace {

/// Tolerance for reproducing the headline counterexample values.
constexpr double kReproductionTolerance = 1e-4;

std::string read_text(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": invalid JSON: " + e.what());
  }
}

void round_numbers(json& j) {
  if (j.is_number_float()) {
    j = round_significant(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& child : j) round_numbers(child);
  }
}

void print_json(std::ostream& out, json j) {
  round_numbers(j);
  out << j.dump(2) << '\n';
}

Plan read_plan(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return plan_from_json(parse_json(text, path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::vector<std::size_t> one_based(std::span<const std::size_t> v) {
  std::vector<std::size_t> out(v.begin(), v.end());
  for (auto& i : out) ++i;
  return out;
}

json plan_result_json(const PlanResult& result) {
  return {{"search", std::string(to_string(result.search))},
          {"procedure", std::string(to_string(result.report.procedure))},
          {"plan", to_json_value(result.plan)},
          {"report", to_json_value(result.report)},
          {"sorted_permutation", one_based(result.sorted_permutation)}};
}

std::vector<Procedure> procedures_from(const std::string& name) {
  if (name == "all") return {std::begin(kAllProcedures), std::end(kAllProcedures)};
  return {parse_procedure(name)};
}

Ordering ordering_from(const std::string& name) {
  if (name == "optimal") return Ordering::Optimal;
  if (name == "given") return Ordering::Given;
  throw InputError("unknown arrangement '" + name + "' (expected given or optimal)");
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      throw InputError(what + ": '" + t + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InputError(what + " is empty");
  return out;
}

// --- subcommands ----------------------------------------------------------

struct EvalArgs {
  std::string probs;
  std::string procedure = "S";
  std::string plan;
  bool single_group = false;
  std::string arrange = "optimal";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto pv = read_probabilities(a.probs);
  const auto procedure = parse_procedure(a.procedure);
  const auto ordering = ordering_from(a.arrange);
  if (a.plan.empty() == !a.single_group) {
    throw InputError("eval needs exactly one of --plan or --single-group");
  }
  CostReport report;
  if (a.single_group) {
    const Group whole = Group::whole_population(pv.size());
    report = evaluate_groups(std::span<const Group>(&whole, 1), pv, procedure, ordering);
  } else {
    const Plan plan = read_plan(a.plan);
    report = evaluate_plan(plan, pv, procedure, ordering);
  }
  json j = to_json_value(report);
  j["arrange"] = a.arrange;
  print_json(out, j);
  return kSuccess;
}

struct OptimizeArgs {
  std::string probs;
  std::string procedure = "S";
  std::string search = "dp";
};

int cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
  const auto pv = read_probabilities(a.probs);
  const auto result = optimize(pv, parse_procedure(a.procedure), parse_search(a.search));
  print_json(out, plan_result_json(result));
  return kSuccess;
}

struct OracleArgs {
  std::string probs;
  std::string procedure = "all";
  std::string quad;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  if (a.probs.empty() == a.quad.empty()) {
    throw InputError("oracle needs exactly one of --probs or --quad");
  }
  json doc = json::array();
  bool consistent = true;
  if (!a.quad.empty()) {
    const auto q = parse_number_list(a.quad, "--quad");
    if (q.size() != 4) throw InputError("--quad needs exactly four q values");
    for (Procedure proc : procedures_from(a.procedure)) {
      if (proc == Procedure::Dorfman) continue;
      const auto r = interchange_check({q[0], q[1], q[2], q[3]}, proc);
      const bool holds = r.swapped_pairs <= r.sorted_pairs;
      consistent = consistent && holds;
      doc.push_back({{"procedure", std::string(to_string(proc))},
                     {"sorted_pairs", r.sorted_pairs},
                     {"swapped_pairs", r.swapped_pairs},
                     {"swap_never_worse", holds}});
    }
  } else {
    const auto pv = read_probabilities(a.probs);
    for (Procedure proc : procedures_from(a.procedure)) {
      const auto dp = dp_ordered(pv, proc);
      const auto ordered = exhaustive_ordered(pv, proc);
      const auto set = exhaustive_set(pv, proc);
      const bool dp_ok = nearly_equal(dp.report.total, ordered.report.total);
      const bool sandwich = set.report.total <= dp.report.total + 1e-12 &&
                            dp.report.total <= static_cast<double>(pv.size()) + 1e-12;
      consistent = consistent && dp_ok && sandwich;
      doc.push_back({{"procedure", std::string(to_string(proc))},
                     {"dp", plan_result_json(dp)},
                     {"exhaustive_ordered", plan_result_json(ordered)},
                     {"exhaustive_set", plan_result_json(set)},
                     {"dp_matches_exhaustive_ordered", dp_ok},
                     {"unordered_saving", dp.report.total - set.report.total},
                     {"sandwich_holds", sandwich}});
    }
  }
  print_json(out, doc);
  return consistent ? kSuccess : kReproductionFailure;
}

struct SimulateArgs {
  std::string probs;
  std::string procedure = "all";
  std::string plan;
  bool single_group = false;
  std::string arrange = "optimal";
  std::uint64_t replicates = 100000;
  std::uint64_t seed = 1;
  bool no_crn = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto pv = read_probabilities(a.probs);
  const auto ordering = ordering_from(a.arrange);
  std::optional<Plan> fixed_plan;
  if (!a.plan.empty()) fixed_plan = read_plan(a.plan);
  if (a.single_group) fixed_plan = OrderedPartition::make({pv.size()}, pv.size());

  SimulationOptions options;
  options.replicates = a.replicates;
  options.seed = a.seed;
  options.ordering = ordering;
  options.common_random_numbers = !a.no_crn;

  json doc = json::array();
  for (Procedure proc : procedures_from(a.procedure)) {
    const Plan plan = fixed_plan ? *fixed_plan : Plan(dp_ordered(pv, proc).plan);
    const auto summary = estimate_cost(plan, pv, proc, options);
    const double exact = evaluate_plan(plan, pv, proc, ordering).total;
    json entry = to_json_value(summary);
    entry["closed_form"] = exact;
    entry["z_score"] = summary.std_error > 0.0
                           ? (summary.mean_tests - exact) / summary.std_error
                           : 0.0;
    entry["common_random_numbers"] = !a.no_crn;
    doc.push_back(entry);
  }
  print_json(out, doc);
  return kSuccess;
}

struct BoundsArgs {
  std::string probs;
  std::optional<double> achieved;
  std::string procedure = "S";
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  const auto pv = read_probabilities(a.probs);
  json j;
  double achieved = 0.0;
  if (a.achieved) {
    achieved = *a.achieved;
    j["achieved_source"] = "given";
  } else {
    const auto proc = parse_procedure(a.procedure);
    achieved = dp_ordered(pv, proc).report.total;
    j["achieved_source"] = "dp:" + std::string(to_string(proc));
  }
  const auto report = check_bounds(pv, achieved);
  j["entropy"] = report.entropy;
  j["huffman_length"] = report.huffman ? json(*report.huffman) : json(nullptr);
  j["achieved"] = report.achieved;
  j["entropy_le_huffman"] = report.entropy_le_huffman;
  j["huffman_le_entropy_plus_one"] = report.huffman_le_entropy_plus_one;
  j["achieved_ge_huffman"] = report.achieved_ge_huffman;
  j["achieved_ge_entropy"] = report.achieved_ge_entropy;
  j["ungar_threshold"] = ungar_threshold();
  j["all_above_ungar"] = all_above_ungar(pv);
  print_json(out, j);
  return kSuccess;
}

struct StudyArgs {
  std::string p_list = "0.001,0.01,0.05,0.10,0.20,0.30";
  std::size_t n = 100;
  std::size_t m = 200;
  bool full = false;
  std::uint64_t seed = StudyConfig{}.seed;
  std::string format = "csv";
  std::string s_arrangement = "published";
  std::string out_path;
};

int cmd_study(const StudyArgs& a, std::ostream& out) {
  StudyConfig config;
  config.p_targets = parse_number_list(a.p_list, "--p-list");
  config.n = a.n;
  config.m = a.full ? 1000 : a.m;
  config.seed = a.seed;
  config.s_rule = parse_sterrett_rule(a.s_arrangement);
  const auto format = parse_table_format(a.format);
  config.validate();
  const std::string table = emit_table(run_study(config), format, &config);
  if (a.out_path.empty()) {
    out << table;
  } else {
    std::ofstream file(a.out_path, std::ios::binary);
    if (!file) throw InputError(a.out_path + ": cannot write file");
    file << table;
  }
  return kSuccess;
}

int cmd_counterexample(bool as_json, std::ostream& out) {
  const std::vector<double> probs{0.4, 0.4, 0.01, 0.01};
  const auto pv = ProbabilityVector::validate(probs);
  struct Check {
    std::string name;
    double expected;
    double actual;
    bool pass;
  };
  auto check = [](std::string name, double expected, double actual) {
    return Check{std::move(name), expected, actual,
                 std::abs(expected - actual) <= kReproductionTolerance};
  };
  const std::vector<Check> checks{
      check("ordered_optimum_S", 2.83794, dp_ordered(pv, Procedure::Sterrett).report.total),
      check("ordered_optimum_Dp", 2.8438,
            dp_ordered(pv, Procedure::ModifiedDorfman).report.total),
      check("unordered_optimum_S", 2.832,
            exhaustive_set(pv, Procedure::Sterrett).report.total),
      check("unordered_optimum_Dp", 2.832,
            exhaustive_set(pv, Procedure::ModifiedDorfman).report.total),
  };
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;

  if (as_json) {
    json j;
    j["probabilities"] = probs;
    j["tolerance"] = kReproductionTolerance;
    j["checks"] = json::array();
    for (const auto& c : checks) {
      j["checks"].push_back({{"name", c.name},
                             {"expected", c.expected},
                             {"actual", c.actual},
                             {"pass", c.pass}});
    }
    j["verdict"] = all ? "PASS" : "FAIL";
    print_json(out, j);
  } else {
    out << "population q = {0.6, 0.6, 0.99, 0.99}\n";
    for (const auto& c : checks) {
      char line[160];
      std::snprintf(line, sizeof line, "%-22s expected %-10.10g got %-12.10g %s\n",
                    c.name.c_str(), c.expected, c.actual, c.pass ? "PASS" : "FAIL");
      out << line;
    }
    out << (all ? "PASS" : "FAIL") << '\n';
  }
  return all ? kSuccess : kReproductionFailure;
}

}  // namespace

ProbabilityVector parse_probabilities(const std::string& text, const std::string& source) {
  const std::string stripped = trim(text);
  if (!stripped.empty() && stripped.front() == '{') {
    const json j = parse_json(text, source);
    try {
      return probability_vector_from_json(j);
    } catch (const OutOfRange& e) {
      throw InputError(source + ": entry " + std::to_string(e.index() + 1) + " of \"p\": " +
                       e.what());
    } catch (const InputError& e) {
      throw InputError(source + ": " + e.what());
    }
  }

  std::vector<double> probs;
  std::vector<std::size_t> lines;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string t = trim(raw);
    if (t.empty() || t.front() == '#') continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw InputError(source + ":" + std::to_string(line_no) + ": '" + t +
                       "' is not a decimal number");
    }
    probs.push_back(v);
    lines.push_back(line_no);
  }
  try {
    return ProbabilityVector::validate(probs);
  } catch (const OutOfRange& e) {
    throw InputError(source + ":" + std::to_string(lines[e.index()]) + ": " + e.what());
  } catch (const EmptyInput& e) {
    throw InputError(source + ": " + e.what());
  }
}

ProbabilityVector read_probabilities(const std::string& path) {
  return parse_probabilities(read_text(path), path == "-" ? "<stdin>" : path);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design and evaluate pooled testing plans (Dorfman, modified Dorfman, Sterrett)",
               "pooltest"};
  app.require_subcommand(1);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Expected tests of a given plan");
  eval->add_option("--probs", eval_args.probs, "Probability file (JSON or one per line)")
      ->required();
  eval->add_option("--procedure", eval_args.procedure, "D, Dp or S")->capture_default_str();
  auto* eval_plan = eval->add_option("--plan", eval_args.plan, "Plan file (JSON)");
  auto* eval_single =
      eval->add_flag("--single-group", eval_args.single_group, "Test everything as one group");
  eval_plan->excludes(eval_single);
  eval->add_option("--arrange", eval_args.arrange, "given or optimal")->capture_default_str();

  OptimizeArgs opt_args;
  auto* opt = app.add_subcommand("optimize", "Search for a minimum-cost plan");
  opt->add_option("--probs", opt_args.probs, "Probability file")->required();
  opt->add_option("--procedure", opt_args.procedure, "D, Dp or S")->capture_default_str();
  opt->add_option("--search", opt_args.search, "dp, exhaustive-ordered or exhaustive-set")
      ->capture_default_str();

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand(
      "oracle", "Cross-check the DP against exhaustive searches, or run the pair interchange");
  auto* oracle_probs = oracle->add_option("--probs", oracle_args.probs, "Probability file");
  auto* oracle_quad =
      oracle->add_option("--quad", oracle_args.quad, "q1,q2,q3,q4 in descending order");
  oracle_probs->excludes(oracle_quad);
  oracle->add_option("--procedure", oracle_args.procedure, "D, Dp, S or all")
      ->capture_default_str();

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo run of the testing protocols");
  sim->add_option("--probs", sim_args.probs, "Probability file")->required();
  sim->add_option("--procedure", sim_args.procedure, "D, Dp, S or all")->capture_default_str();
  auto* sim_plan = sim->add_option("--plan", sim_args.plan, "Plan file (default: DP optimum)");
  auto* sim_single = sim->add_flag("--single-group", sim_args.single_group);
  sim_plan->excludes(sim_single);
  sim->add_option("--arrange", sim_args.arrange, "given or optimal")->capture_default_str();
  sim->add_option("--replicates", sim_args.replicates)->capture_default_str();
  sim->add_option("--seed", sim_args.seed)->capture_default_str();
  sim->add_flag("--no-crn", sim_args.no_crn,
                "Independent streams per procedure instead of common random numbers");

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "Entropy and Huffman lower bounds");
  bounds->add_option("--probs", bounds_args.probs, "Probability file")->required();
  auto* bounds_achieved =
      bounds->add_option("--achieved", bounds_args.achieved, "Achieved expected tests");
  auto* bounds_proc = bounds->add_option("--procedure", bounds_args.procedure,
                                         "Use the DP optimum of this procedure as achieved");
  bounds_achieved->excludes(bounds_proc);

  StudyArgs study_args;
  auto* study = app.add_subcommand("study", "Simulation study over Beta(1,beta) risks");
  study->add_option("--p-list", study_args.p_list, "Comma-separated mean risks")
      ->capture_default_str();
  study->add_option("--n", study_args.n, "Population size")->capture_default_str();
  auto* study_m =
      study->add_option("--m", study_args.m, "Replicates per row")->capture_default_str();
  auto* study_full = study->add_flag("--full", study_args.full, "Use 1000 replicates");
  study_m->excludes(study_full);
  study->add_option("--seed", study_args.seed)->capture_default_str();
  study->add_option("--format", study_args.format, "csv, json or markdown")
      ->capture_default_str();
  study->add_option("--s-arrangement", study_args.s_arrangement,
                    "S block order: published (reproduces the table) or optimal")
      ->capture_default_str();
  study->add_option("--out", study_args.out_path, "Output file (default stdout)");

  bool counter_json = false;
  auto* counter = app.add_subcommand("counterexample",
                                     "Ordered vs unordered optimum on the four-item example");
  counter->add_flag("--json", counter_json);

  std::vector<std::string> argv_storage{"pooltest"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    // Validates POOLTEST_THREADS before any work starts.
    resolve_threads(0);
    if (eval->parsed()) return cmd_eval(eval_args, out);
    if (opt->parsed()) return cmd_optimize(opt_args, out);
    if (oracle->parsed()) return cmd_oracle(oracle_args, out);
    if (sim->parsed()) return cmd_simulate(sim_args, out);
    if (bounds->parsed()) return cmd_bounds(bounds_args, out);
    if (study->parsed()) return cmd_study(study_args, out);
    if (counter->parsed()) return cmd_counterexample(counter_json, out);
  } catch (const InstanceTooLarge& e) {
    err << "pooltest: " << e.what() << '\n';
    return kResourceGuard;
  } catch (const InputError& e) {
    err << "pooltest: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "pooltest: internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInputError;
}

}  // namespace pooltest::cli
