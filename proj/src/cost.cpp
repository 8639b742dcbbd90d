#include "pooltest/cost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pooltest {

namespace {

double product(std::span<const double> q) {
  return std::accumulate(q.begin(), q.end(), 1.0, std::multiplies<>());
}

}  // namespace

double dorfman_cost(std::span<const double> q) {
  const auto k = static_cast<double>(q.size());
  if (q.size() <= 1) return 1.0;
  return 1.0 + k - k * product(q);
}

double modified_dorfman_cost(std::span<const double> q) {
  if (q.size() <= 1) return 1.0;
  const auto k = static_cast<double>(q.size());
  const double head = product(q.first(q.size() - 1));
  const double all = head * q.back();
  return 1.0 + k - k * all - head * (1.0 - q.back());
}

double sterrett_cost(std::span<const double> q) {
  const std::size_t k = q.size();
  if (k <= 1) return 1.0;
  double bracket = 0.0;
  // Sum of q_1..q_{k-1} plus suffix products q_{k-1}q_k, ..., q_1...q_k.
  double suffix = q[k - 1];
  for (std::size_t i = k - 1; i-- > 0;) {
    bracket += q[i];
    suffix *= q[i];
    bracket += suffix;
  }
  return static_cast<double>(2 * k - 1) - bracket;
}

double sterrett_cost_recursive(std::span<const double> q) {
  const std::size_t k = q.size();
  if (k <= 1) return 1.0;
  // expected[s]: expected tests for the fresh group q[s..k-1].
  std::vector<double> expected(k + 1, 0.0);
  expected[k - 1] = 1.0;
  for (std::size_t s = k - 1; s-- > 0;) {
    const std::size_t m = k - s;
    const auto a = q.subspan(s);
    double total = 0.0;
    // Prefix product a_1...a_{j-1} of members before position j (1-based).
    double prefix = 1.0;
    for (std::size_t j = 1; j <= m; ++j) {
      const double first_defective_here = prefix * (1.0 - a[j - 1]);
      double tests = 0.0;
      if (j == m) {
        tests = static_cast<double>(m);  // last member deduced
      } else if (j == m - 1) {
        tests = static_cast<double>(m + 1);
      } else {
        tests = 1.0 + static_cast<double>(j) + expected[s + j];
      }
      total += first_defective_here * tests;
      prefix *= a[j - 1];
    }
    total += prefix;  // no defective: the pool test alone
    expected[s] = total;
  }
  return expected[0];
}

double sterrett_cost_equal_p(std::size_t k, double q) {
  if (k == 0) throw InputError("group size must be at least 1");
  if (!(q > 0.0 && q < 1.0)) throw InputError("q must be strictly between 0 and 1");
  if (k == 1) return 1.0;
  const auto kd = static_cast<double>(k);
  return 2.0 * kd - (kd - 2.0) * q -
         (1.0 - std::pow(q, kd + 1.0)) / (1.0 - q);
}

double group_cost(Procedure procedure, std::span<const double> q) {
  switch (procedure) {
    case Procedure::Dorfman:
      return dorfman_cost(q);
    case Procedure::ModifiedDorfman:
      return modified_dorfman_cost(q);
    case Procedure::Sterrett:
      return sterrett_cost(q);
  }
  return 0.0;
}

double cost_D(const Group& group, const ProbabilityVector& pv) {
  return dorfman_cost(group.qs(pv));
}

double cost_Dprime(const Group& group, const ProbabilityVector& pv) {
  return modified_dorfman_cost(group.qs(pv));
}

double cost_S(const Group& group, const ProbabilityVector& pv) {
  return sterrett_cost(group.qs(pv));
}

double cost_S_recursive(const Group& group, const ProbabilityVector& pv) {
  return sterrett_cost_recursive(group.qs(pv));
}

double group_cost(Procedure procedure, const Group& group, const ProbabilityVector& pv) {
  return group_cost(procedure, group.qs(pv));
}

namespace {

struct SterrettChoice {
  std::size_t last;  // position in ascending order moved to the end
  double bracket;    // the bracketed sum of the closed form, maximised
};

// Ascending q values a(0) <= ... <= a(k-1). With a(c) tested last and the rest
// ascending, the bracket equals
//   T - a_c + a_c * sum_{i>c} P_i + sum_{i<c} P_i,   P_i = a_i * ... * a_{k-1}.
// Two passes, no allocation. Ties keep the smallest c.
template <typename At>
SterrettChoice best_sterrett_last(std::size_t k, At a) {
  double total = 0.0;
  double all_suffixes = 0.0;
  double suffix = 1.0;
  for (std::size_t i = k; i-- > 0;) {
    total += a(i);
    suffix *= a(i);
    all_suffixes += suffix;
  }
  SterrettChoice best{k - 1, -1.0};
  double after = 0.0;  // sum of P_i for i > c
  suffix = 1.0;
  for (std::size_t c = k; c-- > 0;) {
    suffix *= a(c);
    const double before = all_suffixes - suffix - after;
    const double bracket = total - a(c) + a(c) * after + before;
    if (bracket >= best.bracket) best = {c, bracket};
    after += suffix;
  }
  return best;
}

}  // namespace

ArrangedGroup arrange_for_S(const Group& group, const ProbabilityVector& pv) {
  std::vector<std::size_t> items(group.items().begin(), group.items().end());
  std::stable_sort(items.begin(), items.end(), [&](std::size_t a, std::size_t b) {
    return pv.q(a) < pv.q(b) || (pv.q(a) == pv.q(b) && a < b);
  });
  if (items.size() > 1) {
    const auto choice =
        best_sterrett_last(items.size(), [&](std::size_t i) { return pv.q(items[i]); });
    std::rotate(items.begin() + static_cast<std::ptrdiff_t>(choice.last),
                items.begin() + static_cast<std::ptrdiff_t>(choice.last) + 1, items.end());
  }
  return {Group::make(std::move(items), pv.size()), Arrangement::OptimalSterrett};
}

ArrangedGroup arrange_for_Dprime(const Group& group, const ProbabilityVector& pv) {
  std::vector<std::size_t> items(group.items().begin(), group.items().end());
  std::stable_sort(items.begin(), items.end(), [&](std::size_t a, std::size_t b) {
    return pv.q(a) > pv.q(b) || (pv.q(a) == pv.q(b) && a < b);
  });
  return {Group::make(std::move(items), pv.size()), Arrangement::OptimalModifiedDorfman};
}

ArrangedGroup arrange_optimal(Procedure procedure, const Group& group,
                              const ProbabilityVector& pv) {
  switch (procedure) {
    case Procedure::ModifiedDorfman:
      return arrange_for_Dprime(group, pv);
    case Procedure::Sterrett:
      return arrange_for_S(group, pv);
    case Procedure::Dorfman:
      break;
  }
  return {group, Arrangement::AsGiven};
}

std::string_view to_string(SterrettRule rule) {
  return rule == SterrettRule::Published ? "published" : "optimal";
}

SterrettRule parse_sterrett_rule(std::string_view name) {
  if (name == "optimal") return SterrettRule::Optimal;
  if (name == "published") return SterrettRule::Published;
  throw InputError("unknown S arrangement '" + std::string(name) + "' (expected optimal or published)");
}

double sorted_block_cost(Procedure procedure, std::span<const double> d, SterrettRule rule) {
  const std::size_t m = d.size();
  if (m <= 1) return 1.0;
  switch (procedure) {
    case Procedure::Dorfman:
      return dorfman_cost(d);
    case Procedure::ModifiedDorfman:
      // Descending order already puts the smallest q last.
      return modified_dorfman_cost(d);
    case Procedure::Sterrett:
      break;
  }
  if (rule == SterrettRule::Published) {
    // Order (d_{m-2}, ..., d_0, d_{m-1}).
    double bracket = 0.0;
    double suffix = d[m - 1];
    for (std::size_t j = 0; j + 1 < m; ++j) {
      bracket += d[j];
      suffix *= d[j];
      bracket += suffix;
    }
    return static_cast<double>(2 * m - 1) - bracket;
  }
  const auto choice = best_sterrett_last(m, [&](std::size_t i) { return d[m - 1 - i]; });
  return static_cast<double>(2 * m - 1) - choice.bracket;
}

CostReport evaluate_groups(std::span<const Group> groups, const ProbabilityVector& pv,
                           Procedure procedure, Ordering ordering) {
  CostReport report;
  report.procedure = procedure;
  report.per_block.reserve(groups.size());
  for (const Group& g : groups) {
    const Group arranged =
        ordering == Ordering::Optimal ? arrange_optimal(procedure, g, pv).group : g;
    BlockCost bc;
    bc.block.assign(g.items().begin(), g.items().end());
    bc.order.assign(arranged.items().begin(), arranged.items().end());
    bc.expected_tests = group_cost(procedure, arranged, pv);
    report.total += bc.expected_tests;
    report.per_block.push_back(std::move(bc));
  }
  return report;
}

CostReport evaluate_plan(const Plan& plan, const ProbabilityVector& pv,
                         Procedure procedure, Ordering ordering) {
  if (population_size(plan) != pv.size()) {
    throw InputError("plan covers " + std::to_string(population_size(plan)) +
                     " items, population has " + std::to_string(pv.size()));
  }
  const auto groups = plan_groups(plan, sort_ascending(pv));
  return evaluate_groups(groups, pv, procedure, ordering);
}

}  // namespace pooltest
