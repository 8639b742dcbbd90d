#pragma once

// Execution-level simulation of the three testing protocols, an exhaustive
// outcome oracle for their expectations, and Monte Carlo estimation of plan
// costs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pooltest/cost.hpp"
#include "pooltest/model.hpp"

namespace pooltest {

/// Identifies one replicate's random stream. The generator for (seed, stream)
/// is fully determined by the pair.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

class Rng {
 public:
  explicit Rng(RngSpec spec);

  /// Uniform double in [0,1) with 53 random bits.
  double uniform();
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

enum class Status : std::uint8_t { Good, Defective };

struct ProtocolTrace {
  std::size_t tests_performed = 0;
  /// Aligned with the group's testing order.
  std::vector<Status> classifications;
  /// Positions (into the testing order) classified by deduction.
  std::vector<std::size_t> inferred_without_test;
};

/// `defects[i]` is the true state of the member at testing position i.
ProtocolTrace run_D(const std::vector<bool>& defects);
ProtocolTrace run_Dprime(const std::vector<bool>& defects);
ProtocolTrace run_S(const std::vector<bool>& defects);
ProtocolTrace run_protocol(Procedure procedure, const std::vector<bool>& defects);

/// Sum over all 2^k defect patterns of P(pattern) * tests(pattern), running
/// the protocol on each. q is in testing order; k <= 24.
double enumerate_expected_tests(Procedure procedure, std::span<const double> q);

/// Inverse-CDF draw from Beta(1, beta): 1 - (1-u)^(1/beta).
double beta_one_from_uniform(double u, double beta);
/// Draws from Beta(1, beta), redrawing results that round to 0 or 1.
double sample_beta_one(double beta, Rng& rng);

struct SimulationOptions {
  std::uint64_t replicates = 10000;
  std::uint64_t seed = 0;
  Ordering ordering = Ordering::Optimal;
  /// When false, each procedure draws from its own streams instead of sharing
  /// the defect patterns of replicate r.
  bool common_random_numbers = true;
  /// 0 means hardware concurrency (capped by POOLTEST_THREADS).
  unsigned threads = 0;
};

/// Samples `replicates` defect vectors and runs the protocol on every block of
/// the plan. Throws InputError when replicates < 2 or the plan does not
/// match the population.
SimulationSummary estimate_cost(const Plan& plan, const ProbabilityVector& pv,
                                Procedure procedure, const SimulationOptions& options);

/// Worker count honouring POOLTEST_THREADS. Throws InputError on a malformed
/// variable.
unsigned resolve_threads(unsigned requested);

}  // namespace pooltest
