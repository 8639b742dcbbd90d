#pragma once

// Core domain types shared by every pooltest module: the population's defect
// probabilities, groups, partition plans and cost reports.
//
// Indices are 0-based in the C++ API. The JSON interchange form (json.hpp)
// uses 1-based item indices.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pooltest/error.hpp"

namespace pooltest {

enum class Procedure {
  Dorfman,          // D
  ModifiedDorfman,  // D'
  Sterrett,         // S
};

inline constexpr Procedure kAllProcedures[] = {
    Procedure::Dorfman, Procedure::ModifiedDorfman, Procedure::Sterrett};

/// "D", "Dp" or "S".
std::string_view to_string(Procedure procedure);
/// Accepts "D", "Dp" (also "D'") and "S"; throws InputError otherwise.
Procedure parse_procedure(std::string_view name);

/// Defect probabilities p_1..p_N, each strictly inside (0,1).
/// q_i = 1 - p_i is always derived, never stored.
class ProbabilityVector {
 public:
  /// Validates `raw`; throws EmptyInput or OutOfRange.
  static ProbabilityVector validate(std::span<const double> raw);
  static ProbabilityVector validate(std::span<const double> raw,
                                    std::vector<std::string> ids);

  std::size_t size() const noexcept { return probs_.size(); }
  double p(std::size_t i) const { return probs_[i]; }
  double q(std::size_t i) const { return 1.0 - probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  /// q for every item, in index order.
  std::vector<double> qs() const;

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  bool has_ids() const noexcept { return !ids_.empty(); }

  double min_p() const;

  friend bool operator==(const ProbabilityVector&,
                         const ProbabilityVector&) = default;

 private:
  ProbabilityVector() = default;

  std::vector<double> probs_;
  std::vector<std::string> ids_;
};

inline ProbabilityVector validate_probability_vector(std::span<const double> raw) {
  return ProbabilityVector::validate(raw);
}

struct SortedPopulation {
  ProbabilityVector sorted;
  /// permutation[j] is the original index of sorted position j.
  std::vector<std::size_t> permutation;
};

/// Sorts ascending by p, stable on ties (original index order).
SortedPopulation sort_ascending(const ProbabilityVector& pv);

/// An ordered, duplicate-free, nonempty list of item indices. Position in the
/// list is the individual testing order.
class Group {
 public:
  /// Throws InputError when `items` is empty, has duplicates, or an index is
  /// not below `population_size`.
  static Group make(std::vector<std::size_t> items, std::size_t population_size);
  /// Items 0..n-1 in order.
  static Group whole_population(std::size_t n);

  std::size_t size() const noexcept { return items_.size(); }
  std::span<const std::size_t> items() const noexcept { return items_; }
  std::size_t operator[](std::size_t position) const { return items_[position]; }

  /// q values of the members in testing order.
  std::vector<double> qs(const ProbabilityVector& pv) const;

  friend bool operator==(const Group&, const Group&) = default;

 private:
  explicit Group(std::vector<std::size_t> items) : items_(std::move(items)) {}

  std::vector<std::size_t> items_;
};

/// Block sizes over the population sorted ascending by p; block j covers a
/// contiguous run of the sorted order.
class OrderedPartition {
 public:
  /// Throws InputError if a size is zero or the sizes do not sum to `n`.
  static OrderedPartition make(std::vector<std::size_t> sizes, std::size_t n);
  static OrderedPartition singletons(std::size_t n);

  std::span<const std::size_t> sizes() const noexcept { return sizes_; }
  std::size_t population_size() const noexcept { return n_; }

  /// Groups in original indices, each listed in ascending-p order.
  std::vector<Group> groups(const SortedPopulation& sorted) const;

  friend bool operator==(const OrderedPartition&, const OrderedPartition&) = default;

 private:
  OrderedPartition(std::vector<std::size_t> sizes, std::size_t n)
      : sizes_(std::move(sizes)), n_(n) {}

  std::vector<std::size_t> sizes_;
  std::size_t n_ = 0;
};

/// Arbitrary disjoint blocks covering {0..N-1}. Blocks keep the item order
/// they were given in.
class SetPartition {
 public:
  /// Throws InputError unless the blocks are nonempty, disjoint and cover
  /// 0..n-1 exactly.
  static SetPartition make(std::vector<std::vector<std::size_t>> blocks,
                           std::size_t n);

  std::span<const std::vector<std::size_t>> blocks() const noexcept { return blocks_; }
  std::size_t population_size() const noexcept { return n_; }
  std::vector<Group> groups() const;

  friend bool operator==(const SetPartition&, const SetPartition&) = default;

 private:
  SetPartition(std::vector<std::vector<std::size_t>> blocks, std::size_t n)
      : blocks_(std::move(blocks)), n_(n) {}

  std::vector<std::vector<std::size_t>> blocks_;
  std::size_t n_ = 0;
};

using Plan = std::variant<OrderedPartition, SetPartition>;

std::size_t population_size(const Plan& plan);
/// Groups of a plan in original indices (ordered partitions are resolved
/// through `sorted`; set partitions ignore it).
std::vector<Group> plan_groups(const Plan& plan, const SortedPopulation& sorted);

struct BlockCost {
  /// Block members as listed in the plan (original indices).
  std::vector<std::size_t> block;
  /// Testing order actually costed.
  std::vector<std::size_t> order;
  double expected_tests = 0.0;

  friend bool operator==(const BlockCost&, const BlockCost&) = default;
};

struct CostReport {
  Procedure procedure = Procedure::Sterrett;
  std::vector<BlockCost> per_block;
  double total = 0.0;

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

struct SimulationSummary {
  Procedure procedure = Procedure::Sterrett;
  Plan plan = OrderedPartition::singletons(1);
  std::uint64_t replicates = 0;
  double mean_tests = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const SimulationSummary&, const SimulationSummary&) = default;
};

/// Relative comparison used by the invariants: |a-b| <= tol * max(1,|a|,|b|).
bool nearly_equal(double a, double b, double tol = 1e-12);

}  // namespace pooltest
