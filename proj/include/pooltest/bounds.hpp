#pragma once

// Information-theoretic reference points for the expected number of tests.

#include <cstddef>
#include <optional>
#include <vector>

#include "pooltest/model.hpp"

namespace pooltest {

inline constexpr std::size_t kMaxOutcomeItems = 20;

/// Probabilities of all 2^N defect patterns; bit i of the outcome index is
/// the state of item i. Throws InstanceTooLarge for N > kMaxOutcomeItems.
std::vector<double> outcome_distribution(const ProbabilityVector& pv);

/// Shannon entropy of the product outcome distribution, in bits.
double entropy(const ProbabilityVector& pv);
double binary_entropy(double p);

/// Expected codeword length of an optimal prefix code over the 2^N outcomes.
double huffman_length(const ProbabilityVector& pv);
/// Same for an arbitrary weight vector (must be nonempty). A single symbol
/// has length 0.
double huffman_length(std::vector<double> weights);

struct BoundReport {
  double entropy = 0.0;
  std::optional<double> huffman;
  double achieved = 0.0;

  bool entropy_le_huffman = true;        // H <= L
  bool huffman_le_entropy_plus_one = true;  // L <= H + 1
  bool achieved_ge_huffman = true;       // only meaningful with L
  bool achieved_ge_entropy = true;

  bool all_hold() const noexcept {
    return entropy_le_huffman && huffman_le_entropy_plus_one &&
           achieved_ge_huffman && achieved_ge_entropy;
  }
};

/// Slack used for every inequality in check_bounds.
inline constexpr double kBoundSlack = 1e-9;

/// L is computed only when N <= kMaxOutcomeItems.
BoundReport check_bounds(const ProbabilityVector& pv, double achieved_cost);

/// (3 - sqrt 5) / 2: at or above it, individual testing is optimal.
double ungar_threshold();
bool all_above_ungar(const ProbabilityVector& pv);

}  // namespace pooltest
