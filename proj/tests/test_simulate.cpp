#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pooltest/cost.hpp"
#include "pooltest/optimize.hpp"
#include "pooltest/simulate.hpp"
#include "support/oracles.hpp"

namespace pooltest {
namespace {

std::vector<bool> pattern(std::size_t k, std::uint32_t bits) {
  std::vector<bool> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = ((bits >> i) & 1U) != 0;
  return out;
}

TEST(RunD, Examples) {
  EXPECT_EQ(run_D({false, false, false}).tests_performed, 1u);
  EXPECT_EQ(run_D({false, true, false}).tests_performed, 4u);
  EXPECT_EQ(run_D({true}).tests_performed, 1u);
}

TEST(RunDprime, Examples) {
  const auto last = run_Dprime({false, false, true});
  EXPECT_EQ(last.tests_performed, 3u);
  EXPECT_EQ(last.inferred_without_test, (std::vector<std::size_t>{2}));
  EXPECT_EQ(run_Dprime({true, false, false}).tests_performed, 4u);
  EXPECT_EQ(run_Dprime({false, false}).tests_performed, 1u);
}

TEST(RunS, Examples) {
  const auto last = run_S({false, false, true});
  EXPECT_EQ(last.tests_performed, 3u);
  EXPECT_EQ(last.inferred_without_test, (std::vector<std::size_t>{2}));
  const auto middle = run_S({false, true, false});
  EXPECT_EQ(middle.tests_performed, 4u);
  EXPECT_TRUE(middle.inferred_without_test.empty());
  EXPECT_EQ(run_S({false, false}).tests_performed, 1u);
}

TEST(RunS, TreeOutcomesForThreeItems) {
  // T=1 all good; T=3 only the third bad; T=4 first good, second bad;
  // T=2+T(2:3) first bad.
  for (std::uint32_t bits = 0; bits < 8; ++bits) {
    const auto d = pattern(3, bits);
    std::size_t expected = 0;
    if (bits == 0) {
      expected = 1;
    } else if (!d[0] && !d[1]) {
      expected = 3;
    } else if (!d[0]) {
      expected = 4;
    } else {
      expected = 2 + run_S({d[1], d[2]}).tests_performed;
    }
    EXPECT_EQ(run_S(d).tests_performed, expected) << bits;
  }
}

TEST(RunS, LongGroupDoesNotRecurse) {
  std::vector<bool> d(10000, false);
  d.back() = true;
  d[5000] = true;
  const auto trace = run_S(d);
  EXPECT_EQ(trace.classifications.size(), d.size());
  EXPECT_LE(trace.tests_performed, 2 * d.size() - 1);
}

TEST(Protocols, ClassifyEveryPatternCorrectly) {
  for (std::size_t k = 1; k <= 10; ++k) {
    for (std::uint32_t bits = 0; bits < (1U << k); ++bits) {
      const auto d = pattern(k, bits);
      std::size_t d_tests = 0;
      for (Procedure proc : kAllProcedures) {
        const auto trace = run_protocol(proc, d);
        ASSERT_EQ(trace.classifications.size(), k);
        for (std::size_t i = 0; i < k; ++i) {
          EXPECT_EQ(trace.classifications[i] == Status::Defective, d[i]);
        }
        EXPECT_GE(trace.tests_performed, 1u);
        // Only the final item of a group can ever be deduced.
        EXPECT_LE(trace.inferred_without_test.size(), 1u);
        if (proc == Procedure::Dorfman) {
          d_tests = trace.tests_performed;
          EXPECT_TRUE(trace.inferred_without_test.empty());
        } else if (proc == Procedure::ModifiedDorfman) {
          EXPECT_LE(trace.tests_performed, d_tests);
        }
        if (proc == Procedure::Sterrett) EXPECT_LE(trace.tests_performed, 2 * k - 1);
      }
    }
  }
}

TEST(EnumerateExpectedTests, MatchesClosedForms) {
  testing::Generator gen(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto q = gen.values(gen.size(1, 10), 0.0, 1.0);
    EXPECT_NEAR(enumerate_expected_tests(Procedure::Dorfman, q), dorfman_cost(q), 1e-12);
    EXPECT_NEAR(enumerate_expected_tests(Procedure::ModifiedDorfman, q),
                modified_dorfman_cost(q), 1e-12);
    EXPECT_NEAR(enumerate_expected_tests(Procedure::Sterrett, q), sterrett_cost(q), 1e-12);
  }
  const std::vector<double> big(25, 0.9);
  EXPECT_THROW(enumerate_expected_tests(Procedure::Sterrett, big), InstanceTooLarge);
}

TEST(BetaOne, InverseCdf) {
  EXPECT_DOUBLE_EQ(beta_one_from_uniform(0.5, 1.0), 0.5);
  EXPECT_NEAR(beta_one_from_uniform(0.5, 2.0), 1.0 - std::sqrt(0.5), 1e-15);
  EXPECT_THROW(beta_one_from_uniform(0.5, 0.0), InputError);
}

TEST(BetaOne, MomentsMatchAnalyticValues) {
  Rng rng({99, 0});
  const double beta = 9.0;
  const int n = 400000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_beta_one(beta, rng);
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum_sq / n - mean * mean);
  const double p = 0.1;
  const double sd_exact = p * std::sqrt((1 - p) / (1 + p));
  EXPECT_NEAR(sd_exact, 0.0905, 5e-5);
  EXPECT_NEAR(mean, p, 4 * sd_exact / std::sqrt(n));
  EXPECT_NEAR(sd, sd_exact, 0.01 * sd_exact);
}

TEST(Rng, SameSpecSameDraws) {
  Rng a({5, 7});
  Rng b({5, 7});
  Rng c({5, 8});
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs = differs || x != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(EstimateCost, PairWithinFourStandardErrors) {
  const auto pv = ProbabilityVector::validate(std::vector<double>{0.1, 0.2});
  SimulationOptions options;
  options.replicates = 200000;
  options.seed = 3;
  const Plan plan = OrderedPartition::make({2}, 2);
  const auto s = estimate_cost(plan, pv, Procedure::Sterrett, options);
  EXPECT_GT(s.std_error, 0.0);
  EXPECT_NEAR(s.mean_tests, 1.38, 4 * s.std_error);
  EXPECT_EQ(s.replicates, 200000u);
}

TEST(EstimateCost, CounterexampleUnorderedPlan) {
  const auto pv = ProbabilityVector::validate(std::vector<double>{0.4, 0.4, 0.01, 0.01});
  SimulationOptions options;
  options.replicates = 200000;
  options.seed = 4;
  const Plan plan = SetPartition::make({{0, 2}, {1, 3}}, 4);
  const auto s = estimate_cost(plan, pv, Procedure::Sterrett, options);
  EXPECT_NEAR(s.mean_tests, 2.832, 4 * s.std_error);
}

TEST(EstimateCost, SingletonsAreDeterministic) {
  const auto pv = ProbabilityVector::validate(std::vector<double>{0.3, 0.01, 0.5});
  SimulationOptions options;
  options.replicates = 1000;
  for (Procedure proc : kAllProcedures) {
    const auto s = estimate_cost(OrderedPartition::singletons(3), pv, proc, options);
    EXPECT_EQ(s.mean_tests, 3.0);
    EXPECT_EQ(s.std_error, 0.0);
  }
}

TEST(EstimateCost, RejectsBadInput) {
  const auto pv = ProbabilityVector::validate(std::vector<double>{0.3, 0.01});
  SimulationOptions options;
  options.replicates = 1;
  EXPECT_THROW(estimate_cost(OrderedPartition::singletons(2), pv, Procedure::Sterrett, options),
               InputError);
  options.replicates = 10;
  EXPECT_THROW(estimate_cost(OrderedPartition::singletons(3), pv, Procedure::Sterrett, options),
               InputError);
}

TEST(EstimateCost, IndependentOfThreadCount) {
  testing::Generator gen(22);
  const auto pv = ProbabilityVector::validate(gen.risks(30));
  const auto plan = dp_ordered(pv, Procedure::Sterrett).plan;
  SimulationOptions options;
  options.replicates = 5001;
  options.seed = 17;
  options.threads = 1;
  const auto one = estimate_cost(plan, pv, Procedure::Sterrett, options);
  options.threads = 4;
  EXPECT_EQ(estimate_cost(plan, pv, Procedure::Sterrett, options), one);
  options.threads = 7;
  EXPECT_EQ(estimate_cost(plan, pv, Procedure::Sterrett, options), one);
}

TEST(EstimateCost, CommonRandomNumbersCouplesProcedures) {
  // With shared draws, D' never exceeds D replicate by replicate, so the mean
  // does not either.
  testing::Generator gen(23);
  const auto pv = ProbabilityVector::validate(gen.risks(40));
  const auto plan = dp_ordered(pv, Procedure::Dorfman).plan;
  SimulationOptions options;
  options.replicates = 2000;
  options.seed = 8;
  const auto d = estimate_cost(plan, pv, Procedure::Dorfman, options);
  const auto dp = estimate_cost(plan, pv, Procedure::ModifiedDorfman, options);
  EXPECT_LE(dp.mean_tests, d.mean_tests);
  options.common_random_numbers = false;
  EXPECT_NE(estimate_cost(plan, pv, Procedure::Dorfman, options).mean_tests, d.mean_tests);
}

// Property: the Monte Carlo mean sits within 4 SE of the closed form for
// nearly every seed.
TEST(EstimateCost, ConsistentAcrossSeeds) {
  testing::Generator gen(24);
  const auto pv = ProbabilityVector::validate(gen.risks(20));
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Procedure proc = kAllProcedures[seed % 3];
    const auto best = dp_ordered(pv, proc);
    SimulationOptions options;
    options.replicates = 2000;
    options.seed = seed;
    const auto s = estimate_cost(best.plan, pv, proc, options);
    if (std::abs(s.mean_tests - best.report.total) <= 4 * s.std_error) ++within;
  }
  EXPECT_GE(within, 99);
}

TEST(ResolveThreads, HonoursRequest) {
  EXPECT_GE(resolve_threads(0), 1u);
  EXPECT_LE(resolve_threads(3), 3u);
}

}  // namespace
}  // namespace pooltest
