#pragma once

// Plan search over the population: the dynamic program over ordered
// partitions, and exhaustive oracles over all ordered partitions and all set
// partitions for small instances.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pooltest/cost.hpp"
#include "pooltest/model.hpp"

namespace pooltest {

inline constexpr std::size_t kMaxExhaustiveOrdered = 20;
inline constexpr std::size_t kMaxExhaustiveSet = 13;
inline constexpr std::size_t kMaxBellIndex = 25;

/// Dynamic-programming table over prefixes U_0..U_N of the ascending-p
/// population. cost_to_go[k] is the optimal expected tests for the first k
/// items; the last block of that optimum covers items argmin[k]..k-1.
struct DpTable {
  Procedure procedure = Procedure::Sterrett;
  std::vector<double> cost_to_go;
  std::vector<std::size_t> argmin;
};

/// Runs the DP on probabilities already sorted ascending. Ties between split
/// points go to the largest split (smallest trailing block).
DpTable solve_ordered_dp(std::span<const double> p_ascending, Procedure procedure,
                         SterrettRule rule = SterrettRule::Optimal);

/// Block sizes of the optimum encoded by `table`.
std::vector<std::size_t> backtrack(const DpTable& table);

enum class SearchKind { DpOrdered, ExhaustiveOrdered, ExhaustiveSet };

std::string_view to_string(SearchKind search);
SearchKind parse_search(std::string_view name);

struct PlanResult {
  Plan plan;
  CostReport report;
  SearchKind search = SearchKind::DpOrdered;
  /// Original index of each ascending-p position.
  std::vector<std::size_t> sorted_permutation;
};

/// Optimal ordered partition via the DP. Blocks are costed in their optimal
/// internal arrangement.
PlanResult dp_ordered(const ProbabilityVector& pv, Procedure procedure);
DpTable dp_table(const ProbabilityVector& pv, Procedure procedure);

/// Enumerates all 2^(N-1) ordered partitions. Throws InstanceTooLarge for
/// N > kMaxExhaustiveOrdered. Ties go to the lexicographically smallest size
/// sequence.
PlanResult exhaustive_ordered(const ProbabilityVector& pv, Procedure procedure);

/// Enumerates every set partition (restricted growth strings) with each block
/// optimally arranged. Throws InstanceTooLarge for N > kMaxExhaustiveSet. Ties
/// go to the lexicographically smallest growth string.
PlanResult exhaustive_set(const ProbabilityVector& pv, Procedure procedure);

PlanResult optimize(const ProbabilityVector& pv, Procedure procedure, SearchKind search);

struct PartitionCounts {
  std::uint64_t bell = 0;
  std::uint64_t ordered = 0;
};

/// (B(N), 2^(N-1)) for 1 <= N <= kMaxBellIndex, via the Bell triangle.
PartitionCounts count_partitions(std::size_t n);

/// Calls `visit(growth)` for each restricted growth string of length n in
/// lexicographic order; growth[i] is the block label of item i. Returns the
/// number of strings visited.
template <typename Visitor>
std::uint64_t for_each_restricted_growth_string(std::size_t n, Visitor&& visit);

struct InterchangeResult {
  double sorted_pairs = 0.0;   // {q1,q2} and {q3,q4}
  double swapped_pairs = 0.0;  // {q1,q3} and {q2,q4}
};

/// Costs of the sorted pairing and of the pairing with q2 and q3 exchanged,
/// each pair optimally arranged. Requires q1 >= q2 >= q3 >= q4 (NotSorted)
/// and a deducing procedure (D' or S).
InterchangeResult interchange_check(std::array<double, 4> q, Procedure procedure);

// ---------------------------------------------------------------------------

template <typename Visitor>
std::uint64_t for_each_restricted_growth_string(std::size_t n, Visitor&& visit) {
  if (n == 0) return 0;
  std::vector<std::size_t> growth(n, 0);
  // prefix_max[i] = max(growth[0..i])
  std::vector<std::size_t> prefix_max(n, 0);
  std::uint64_t count = 0;
  while (true) {
    visit(std::span<const std::size_t>(growth));
    ++count;
    std::size_t i = n - 1;
    while (i > 0 && growth[i] > prefix_max[i - 1]) --i;
    if (i == 0) break;
    ++growth[i];
    prefix_max[i] = std::max(prefix_max[i - 1], growth[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      growth[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  return count;
}

}  // namespace pooltest
