#pragma once

// Exact expected number of tests for one group under the Dorfman (D),
// modified Dorfman (D') and Sterrett (S) procedures.
//
// The `*_for` overloads take q values in testing order and are what the
// optimizers call in their inner loops. Every evaluator returns exactly 1 for
// a group of size one.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pooltest/model.hpp"

namespace pooltest {

/// E_D(1:k) = 1 + k - k * prod(q). Independent of the testing order.
double dorfman_cost(std::span<const double> q);
/// E_D'(1:k) = 1 + k - k * prod(q) - prod(q_1..q_{k-1}) * (1 - q_k).
/// The last member is the one that may be classified without a test.
double modified_dorfman_cost(std::span<const double> q);
/// Closed form of the Sterrett procedure:
///   (2k-1) - [(q_1 + ... + q_{k-1}) + q_{k-1}q_k + q_{k-2}q_{k-1}q_k + ... + q_1...q_k]
/// The suffix-product chain is accumulated right to left in one pass.
double sterrett_cost(std::span<const double> q);

/// The same Sterrett expectation, computed by conditioning on the position of
/// the first defective member and recursing on the untested suffix. Kept as
/// an oracle for sterrett_cost; O(k^2).
double sterrett_cost_recursive(std::span<const double> q);

/// Sterrett cost of a group of k items sharing the same q:
///   2k - (k-2) q - (1 - q^{k+1}) / (1 - q)
/// Requires k >= 1 and 0 < q < 1.
double sterrett_cost_equal_p(std::size_t k, double q);

double group_cost(Procedure procedure, std::span<const double> q);

double cost_D(const Group& group, const ProbabilityVector& pv);
double cost_Dprime(const Group& group, const ProbabilityVector& pv);
double cost_S(const Group& group, const ProbabilityVector& pv);
double cost_S_recursive(const Group& group, const ProbabilityVector& pv);
double group_cost(Procedure procedure, const Group& group, const ProbabilityVector& pv);

enum class Arrangement {
  AsGiven,
  OptimalModifiedDorfman,
  OptimalSterrett,
};

struct ArrangedGroup {
  Group group;
  Arrangement rule = Arrangement::AsGiven;
};

/// Minimises sterrett_cost over all permutations. All items but one are
/// tested in ascending q; the remaining one goes last, chosen in O(k) among
/// the k candidates. For k <= 3 the last item is always the smallest q. Equal q
/// values keep index order.
ArrangedGroup arrange_for_S(const Group& group, const ProbabilityVector& pv);

/// Orders the group by descending q (ties by index), which puts the smallest
/// q last and minimises modified_dorfman_cost.
ArrangedGroup arrange_for_Dprime(const Group& group, const ProbabilityVector& pv);

/// Optimal arrangement for `procedure`; D keeps the given order.
ArrangedGroup arrange_optimal(Procedure procedure, const Group& group,
                              const ProbabilityVector& pv);

/// How an S block is ordered. Published is the order in which the smallest q
/// goes last and the rest ascend; it is optimal only for k <= 3 but is what the
/// tabulated simulation study used.
enum class SterrettRule { Optimal, Published };

std::string_view to_string(SterrettRule rule);
/// "optimal" or "published"; throws InputError otherwise.
SterrettRule parse_sterrett_rule(std::string_view name);

/// Cost of an optimally arranged block whose q values are given in
/// non-increasing order (a contiguous run of the ascending-p population).
/// O(k), no allocation.
double sorted_block_cost(Procedure procedure, std::span<const double> q_descending,
                         SterrettRule rule = SterrettRule::Optimal);

enum class Ordering { Given, Optimal };

/// Per-block and total expected tests of `groups`. With Ordering::Optimal each
/// block is rearranged by arrange_optimal before costing.
CostReport evaluate_groups(std::span<const Group> groups, const ProbabilityVector& pv,
                           Procedure procedure, Ordering ordering);

/// Evaluates a plan. Ordered partitions are laid over the ascending-p
/// population; with Ordering::Given their blocks are tested in ascending p.
CostReport evaluate_plan(const Plan& plan, const ProbabilityVector& pv,
                         Procedure procedure, Ordering ordering);

}  // namespace pooltest
