#include "pooltest/optimize.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include "pooltest/cost.hpp"

namespace pooltest {

namespace {

std::vector<double> descending_q(std::span<const double> p_ascending) {
  std::vector<double> q(p_ascending.size());
  std::transform(p_ascending.begin(), p_ascending.end(), q.begin(),
                 [](double p) { return 1.0 - p; });
  return q;
}

PlanResult ordered_result(const ProbabilityVector& pv, const SortedPopulation& sorted,
                          std::vector<std::size_t> sizes, Procedure procedure,
                          SearchKind search) {
  auto plan = OrderedPartition::make(std::move(sizes), pv.size());
  auto report = evaluate_groups(plan.groups(sorted), pv, procedure, Ordering::Optimal);
  return {std::move(plan), std::move(report), search, sorted.permutation};
}

}  // namespace

DpTable solve_ordered_dp(std::span<const double> p_ascending, Procedure procedure,
                         SterrettRule rule) {
  const std::size_t n = p_ascending.size();
  const auto q = descending_q(p_ascending);
  DpTable table;
  table.procedure = procedure;
  table.cost_to_go.assign(n + 1, 0.0);
  table.argmin.assign(n + 1, 0);
  for (std::size_t k = 1; k <= n; ++k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_split = k - 1;
    // Descending split order with a strict comparison keeps the largest
    // split among ties.
    for (std::size_t i = k; i-- > 0;) {
      const double c =
          sorted_block_cost(procedure, std::span<const double>(q).subspan(i, k - i), rule) +
          table.cost_to_go[i];
      if (c < best) {
        best = c;
        best_split = i;
      }
    }
    table.cost_to_go[k] = best;
    table.argmin[k] = best_split;
  }
  return table;
}

std::vector<std::size_t> backtrack(const DpTable& table) {
  std::vector<std::size_t> sizes;
  std::size_t k = table.cost_to_go.size() - 1;
  while (k > 0) {
    const std::size_t i = table.argmin[k];
    sizes.push_back(k - i);
    k = i;
  }
  std::reverse(sizes.begin(), sizes.end());
  return sizes;
}

std::string_view to_string(SearchKind search) {
  switch (search) {
    case SearchKind::DpOrdered:
      return "dp";
    case SearchKind::ExhaustiveOrdered:
      return "exhaustive-ordered";
    case SearchKind::ExhaustiveSet:
      return "exhaustive-set";
  }
  return "?";
}

SearchKind parse_search(std::string_view name) {
  if (name == "dp") return SearchKind::DpOrdered;
  if (name == "exhaustive-ordered") return SearchKind::ExhaustiveOrdered;
  if (name == "exhaustive-set") return SearchKind::ExhaustiveSet;
  throw InputError("unknown search '" + std::string(name) +
                   "' (expected dp, exhaustive-ordered or exhaustive-set)");
}

DpTable dp_table(const ProbabilityVector& pv, Procedure procedure) {
  const auto sorted = sort_ascending(pv);
  return solve_ordered_dp(sorted.sorted.probs(), procedure);
}

PlanResult dp_ordered(const ProbabilityVector& pv, Procedure procedure) {
  const auto sorted = sort_ascending(pv);
  const auto table = solve_ordered_dp(sorted.sorted.probs(), procedure);
  return ordered_result(pv, sorted, backtrack(table), procedure, SearchKind::DpOrdered);
}

PlanResult exhaustive_ordered(const ProbabilityVector& pv, Procedure procedure) {
  const std::size_t n = pv.size();
  if (n > kMaxExhaustiveOrdered) throw InstanceTooLarge(n, kMaxExhaustiveOrdered);
  const auto sorted = sort_ascending(pv);
  const auto q = descending_q(sorted.sorted.probs());

  // block[i * (n + 1) + k]: cost of sorted items i..k-1 as one block.
  std::vector<double> block((n + 1) * (n + 1), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k <= n; ++k) {
      block[i * (n + 1) + k] =
          sorted_block_cost(procedure, std::span<const double>(q).subspan(i, k - i));
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_sizes;
  std::vector<std::size_t> sizes;
  sizes.reserve(n);
  const std::uint64_t compositions = std::uint64_t{1} << (n - 1);
  for (std::uint64_t cuts = 0; cuts < compositions; ++cuts) {
    // Bit b of `cuts` closes a block after sorted position b.
    double total = 0.0;
    sizes.clear();
    std::size_t start = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const bool closes = pos + 1 == n || ((cuts >> pos) & 1U) != 0;
      if (!closes) continue;
      total += block[start * (n + 1) + pos + 1];
      sizes.push_back(pos + 1 - start);
      start = pos + 1;
    }
    if (total < best || (total == best && sizes < best_sizes)) {
      best = total;
      best_sizes = sizes;
    }
  }
  return ordered_result(pv, sorted, std::move(best_sizes), procedure,
                        SearchKind::ExhaustiveOrdered);
}

PlanResult exhaustive_set(const ProbabilityVector& pv, Procedure procedure) {
  const std::size_t n = pv.size();
  if (n > kMaxExhaustiveSet) throw InstanceTooLarge(n, kMaxExhaustiveSet);

  // Optimally arranged cost of every nonempty subset, keyed by bitmask.
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> subset_cost(subsets, 0.0);
  std::vector<double> members;
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    members.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) members.push_back(pv.q(i));
    }
    std::sort(members.begin(), members.end(), std::greater<>());
    subset_cost[mask] = sorted_block_cost(procedure, members);
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_growth;
  std::vector<std::uint32_t> masks(n, 0);
  for_each_restricted_growth_string(n, [&](std::span<const std::size_t> growth) {
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t label = growth[i];
      if (label == blocks) masks[blocks++] = 0;
      masks[label] |= std::uint32_t{1} << i;
    }
    double total = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) total += subset_cost[masks[b]];
    // Lexicographic enumeration: the first minimum is the smallest string.
    if (total < best) {
      best = total;
      best_growth.assign(growth.begin(), growth.end());
    }
  });

  const std::size_t block_count =
      *std::max_element(best_growth.begin(), best_growth.end()) + 1;
  std::vector<std::vector<std::size_t>> blocks(block_count);
  for (std::size_t i = 0; i < n; ++i) blocks[best_growth[i]].push_back(i);
  auto plan = SetPartition::make(std::move(blocks), n);
  auto report = evaluate_groups(plan.groups(), pv, procedure, Ordering::Optimal);
  return {std::move(plan), std::move(report), SearchKind::ExhaustiveSet,
          sort_ascending(pv).permutation};
}

PlanResult optimize(const ProbabilityVector& pv, Procedure procedure, SearchKind search) {
  switch (search) {
    case SearchKind::DpOrdered:
      return dp_ordered(pv, procedure);
    case SearchKind::ExhaustiveOrdered:
      return exhaustive_ordered(pv, procedure);
    case SearchKind::ExhaustiveSet:
      return exhaustive_set(pv, procedure);
  }
  throw InputError("unknown search kind");
}

PartitionCounts count_partitions(std::size_t n) {
  if (n == 0) throw InputError("population size must be at least 1");
  if (n > kMaxBellIndex) throw InstanceTooLarge(n, kMaxBellIndex);
  // Bell triangle: row r starts with the last entry of row r-1 and ends with
  // B(r+1).
  std::vector<std::uint64_t> row{1};
  for (std::size_t r = 1; r < n; ++r) {
    std::vector<std::uint64_t> next{row.back()};
    next.reserve(r + 1);
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return {row.back(), std::uint64_t{1} << (n - 1)};
}

InterchangeResult interchange_check(std::array<double, 4> q, Procedure procedure) {
  if (procedure == Procedure::Dorfman) {
    throw InputError("interchange check applies to D' and S only");
  }
  for (double v : q) {
    if (!(v > 0.0 && v < 1.0)) throw InputError("q values must be strictly between 0 and 1");
  }
  if (!(q[0] >= q[1] && q[1] >= q[2] && q[2] >= q[3])) {
    throw NotSorted("expected q1 >= q2 >= q3 >= q4");
  }
  auto pair = [&](double a, double b) {
    const double d[2] = {a, b};
    return sorted_block_cost(procedure, d);
  };
  return {pair(q[0], q[1]) + pair(q[2], q[3]), pair(q[0], q[2]) + pair(q[1], q[3])};
}

}  // namespace pooltest
