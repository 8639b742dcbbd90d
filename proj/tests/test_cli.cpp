#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pooltest/cli.hpp"
#include "pooltest/cost.hpp"
#include "pooltest/serialization.hpp"

namespace pooltest {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pooltest_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

  static Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  std::string counterexample_probs() { return write("ex3.txt", "0.4\n0.4\n0.01\n0.01\n"); }

  fs::path dir_;
};

TEST_F(CliTest, EvalSingleGroup) {
  const auto probs = write("two.json", R"({"p":[0.1,0.2]})");
  const auto r = call({"eval", "--probs", probs, "--single-group"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_NEAR(r.doc()["total"].get<double>(), 1.38, 1e-12);

  const auto one = write("one.txt", "0.5\n");
  EXPECT_EQ(call({"eval", "--probs", one, "--single-group"}).doc()["total"], 1.0);
}

TEST_F(CliTest, EvalUnorderedCounterexamplePlan) {
  const auto probs = counterexample_probs();
  const auto plan = write("plan.json", R"({"blocks":[[1,3],[2,4]]})");
  const auto r = call({"eval", "--probs", probs, "--plan", plan, "--procedure", "S"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_NEAR(r.doc()["total"].get<double>(), 2.832, 1e-12);
}

TEST_F(CliTest, EvalNeedsExactlyOnePlanSource) {
  const auto probs = counterexample_probs();
  const auto plan = write("plan.json", R"({"ordered_sizes":[4]})");
  EXPECT_EQ(call({"eval", "--probs", probs}).code, cli::kInputError);
  EXPECT_EQ(call({"eval", "--probs", probs, "--plan", plan, "--single-group"}).code,
            cli::kInputError);
  const auto bad_plan = write("bad.json", R"({"ordered_sizes":[2]})");
  EXPECT_EQ(call({"eval", "--probs", probs, "--plan", bad_plan}).code, cli::kInputError);
}

TEST_F(CliTest, OptimizeExamples) {
  const auto probs = counterexample_probs();
  auto r = call({"optimize", "--probs", probs, "--procedure", "S"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_NEAR(r.doc()["report"]["total"].get<double>(), 2.83794, 1e-10);
  r = call({"optimize", "--probs", probs, "--procedure", "S", "--search", "exhaustive-set"});
  EXPECT_NEAR(r.doc()["report"]["total"].get<double>(), 2.832, 1e-10);

  const auto halves = write("halves.txt", "0.5\n0.5\n0.5\n0.5\n0.5\n");
  for (const char* proc : {"D", "Dp", "S"}) {
    r = call({"optimize", "--probs", halves, "--procedure", proc});
    EXPECT_EQ(r.doc()["report"]["total"], 5.0);
    EXPECT_EQ(r.doc()["plan"]["ordered_sizes"], json::parse("[1,1,1,1,1]"));
  }
}

TEST_F(CliTest, ResourceGuardExitCode) {
  std::string text;
  for (int i = 0; i < 14; ++i) text += "0.05\n";
  const auto probs = write("big.txt", text);
  const auto r = call({"optimize", "--probs", probs, "--search", "exhaustive-set"});
  EXPECT_EQ(r.code, cli::kResourceGuard);
  EXPECT_NE(r.err.find("13"), std::string::npos);
}

TEST_F(CliTest, DiagnosticsNameTheLine) {
  const auto probs = write("bad.txt", "# risks\n0.1\n1.5\n");
  const auto r = call({"eval", "--probs", probs, "--single-group"});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("bad.txt:3"), std::string::npos) << r.err;

  const auto junk = write("junk.txt", "0.1\nabc\n");
  const auto r2 = call({"eval", "--probs", junk, "--single-group"});
  EXPECT_EQ(r2.code, cli::kInputError);
  EXPECT_NE(r2.err.find("junk.txt:2"), std::string::npos) << r2.err;

  EXPECT_EQ(call({"eval", "--probs", (dir_ / "missing.txt").string(), "--single-group"}).code,
            cli::kInputError);
  EXPECT_EQ(call({"eval", "--probs", write("empty.txt", "# nothing\n"), "--single-group"}).code,
            cli::kInputError);
}

TEST_F(CliTest, ParseProbabilitiesFormats) {
  const auto pv = cli::parse_probabilities("0.1\n\n# c\n0.2\n", "mem");
  EXPECT_EQ(pv.size(), 2u);
  const auto js = cli::parse_probabilities(R"({"p":[0.3],"ids":["a"]})", "mem");
  EXPECT_EQ(js.ids(), (std::vector<std::string>{"a"}));
  EXPECT_THROW(cli::parse_probabilities("{\"p\":", "mem"), InputError);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(call({}).code, cli::kInputError);
  EXPECT_EQ(call({"frobnicate"}).code, cli::kInputError);
  const auto probs = counterexample_probs();
  EXPECT_EQ(call({"optimize", "--probs", probs, "--procedure", "X"}).code, cli::kInputError);
  EXPECT_EQ(call({"optimize", "--probs", probs, "--search", "greedy"}).code, cli::kInputError);
  EXPECT_EQ(call({"--help"}).code, cli::kSuccess);
}

// Property: output re-parsed through the library reproduces the printed total.
TEST_F(CliTest, OutputsReparse) {
  const auto probs = write("mix.txt", "0.02\n0.3\n0.05\n0.11\n0.01\n0.2\n0.07\n");
  const auto pv = cli::read_probabilities(probs);
  for (const char* search : {"dp", "exhaustive-ordered", "exhaustive-set"}) {
    for (Procedure proc : kAllProcedures) {
      const auto r = call({"optimize", "--probs", probs, "--procedure",
                           std::string(to_string(proc)), "--search", search});
      ASSERT_EQ(r.code, cli::kSuccess) << r.err;
      const auto doc = r.doc();
      const auto plan = plan_from_json(doc["plan"]);
      const double total = evaluate_plan(plan, pv, proc, Ordering::Optimal).total;
      EXPECT_EQ(round_significant(total), doc["report"]["total"].get<double>());
      const auto report = cost_report_from_json(doc["report"]);
      EXPECT_EQ(report.per_block.size(), doc["report"]["blocks"].size());

      const auto plan_file = write("plan.json", to_json_value(plan).dump());
      const auto e = call({"eval", "--probs", probs, "--plan", plan_file, "--procedure",
                           std::string(to_string(proc))});
      EXPECT_EQ(e.doc()["total"], doc["report"]["total"]);
    }
  }
}

TEST_F(CliTest, OracleCommands) {
  auto r = call({"oracle", "--quad", "0.99,0.99,0.6,0.6"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_NEAR(r.doc()[0]["swapped_pairs"].get<double>(), 2.832, 1e-10);
  EXPECT_EQ(call({"oracle", "--quad", "0.6,0.99,0.6,0.6"}).code, cli::kInputError);
  r = call({"oracle", "--probs", counterexample_probs()});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_EQ(r.doc().size(), 3u);
  EXPECT_EQ(call({"oracle"}).code, cli::kInputError);
}

TEST_F(CliTest, SimulateReportsClosedForm) {
  const auto r = call({"simulate", "--probs", counterexample_probs(), "--procedure", "S",
                       "--replicates", "20000", "--seed", "5"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  const auto s = r.doc()[0];
  EXPECT_NEAR(s["closed_form"].get<double>(), 2.83794, 1e-10);
  EXPECT_LT(std::abs(s["z_score"].get<double>()), 5.0);
  EXPECT_EQ(call({"simulate", "--probs", counterexample_probs(), "--replicates", "1"}).code,
            cli::kInputError);
}

TEST_F(CliTest, BoundsCommand) {
  const auto probs = write("two.txt", "0.1\n0.2\n");
  auto r = call({"bounds", "--probs", probs, "--achieved", "1.38"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_NEAR(r.doc()["huffman_length"].get<double>(), 1.38, 1e-10);
  EXPECT_EQ(r.doc()["achieved_ge_huffman"], true);
  r = call({"bounds", "--probs", probs});
  EXPECT_EQ(r.code, cli::kSuccess);
}

TEST_F(CliTest, StudyCommand) {
  const std::vector<std::string> args{"study", "--p-list", "0.05,0.2", "--n", "20",
                                      "--m",   "5",        "--seed",   "9"};
  const auto a = call(args);
  ASSERT_EQ(a.code, cli::kSuccess) << a.err;
  EXPECT_EQ(call(args).out, a.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')),
            "p,std,D_mean,D_se,Dp_mean,Dp_se,S_mean,S_se,H_mean,H_se");
  EXPECT_EQ(call({"study", "--m", "1"}).code, cli::kInputError);
  EXPECT_EQ(call({"study", "--m", "5", "--full"}).code, cli::kInputError);
  EXPECT_EQ(call({"study", "--n", "5", "--m", "2", "--format", "xlsx"}).code, cli::kInputError);

  const auto path = (dir_ / "table.json").string();
  auto with_out = args;
  with_out.insert(with_out.end(), {"--format", "json", "--out", path, "--s-arrangement", "optimal"});
  ASSERT_EQ(call(with_out).code, cli::kSuccess);
  std::ifstream in(path);
  const auto doc = json::parse(in);
  EXPECT_EQ(doc["rows"].size(), 2u);
  EXPECT_EQ(doc["metadata"]["s_arrangement"], "optimal");
}

TEST_F(CliTest, CounterexampleCommand) {
  auto r = call({"counterexample"});
  EXPECT_EQ(r.code, cli::kSuccess) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  r = call({"counterexample", "--json"});
  ASSERT_EQ(r.code, cli::kSuccess);
  EXPECT_EQ(r.doc()["verdict"], "PASS");
  EXPECT_EQ(r.doc()["checks"].size(), 4u);
}

}  // namespace
}  // namespace pooltest
