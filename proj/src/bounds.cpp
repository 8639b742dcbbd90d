#include "pooltest/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pooltest {

std::vector<double> outcome_distribution(const ProbabilityVector& pv) {
  const std::size_t n = pv.size();
  if (n > kMaxOutcomeItems) throw InstanceTooLarge(n, kMaxOutcomeItems);
  std::vector<double> dist(std::size_t{1} << n);
  dist[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t half = std::size_t{1} << i;
    for (std::size_t m = 0; m < half; ++m) {
      dist[m | half] = dist[m] * pv.p(i);
      dist[m] *= pv.q(i);
    }
  }
  return dist;
}

double binary_entropy(double p) {
  const double q = 1.0 - p;
  return -p * std::log2(p) - q * std::log2(q);
}

double entropy(const ProbabilityVector& pv) {
  double h = 0.0;
  for (double p : pv.probs()) h += binary_entropy(p);
  return h;
}

double huffman_length(std::vector<double> weights) {
  if (weights.empty()) throw InputError("huffman_length needs at least one weight");
  if (weights.size() == 1) return 0.0;
  // Two-queue construction: sorted leaves plus merged nodes, which are
  // produced in nondecreasing order. The expected length equals the sum of
  // all merged weights.
  std::stable_sort(weights.begin(), weights.end());
  std::vector<double> merged;
  merged.reserve(weights.size() - 1);
  std::size_t leaf = 0;
  std::size_t node = 0;
  auto take_smallest = [&] {
    if (node >= merged.size() ||
        (leaf < weights.size() && weights[leaf] <= merged[node])) {
      return weights[leaf++];
    }
    return merged[node++];
  };
  double length = 0.0;
  while (merged.size() + 1 < weights.size()) {
    const double a = take_smallest();
    const double b = take_smallest();
    merged.push_back(a + b);
    length += a + b;
  }
  return length;
}

double huffman_length(const ProbabilityVector& pv) {
  return huffman_length(outcome_distribution(pv));
}

BoundReport check_bounds(const ProbabilityVector& pv, double achieved_cost) {
  BoundReport report;
  report.entropy = entropy(pv);
  report.achieved = achieved_cost;
  report.achieved_ge_entropy = achieved_cost >= report.entropy - kBoundSlack;
  if (pv.size() <= kMaxOutcomeItems) {
    const double l = huffman_length(pv);
    report.huffman = l;
    report.entropy_le_huffman = report.entropy <= l + kBoundSlack;
    report.huffman_le_entropy_plus_one = l <= report.entropy + 1.0 + kBoundSlack;
    report.achieved_ge_huffman = achieved_cost >= l - kBoundSlack;
  }
  return report;
}

double ungar_threshold() { return (3.0 - std::sqrt(5.0)) / 2.0; }

bool all_above_ungar(const ProbabilityVector& pv) {
  return pv.min_p() >= ungar_threshold();
}

}  // namespace pooltest
