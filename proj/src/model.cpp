#include "pooltest/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pooltest {

OutOfRange::OutOfRange(std::size_t index, double value)
    : InputError([&] {
        std::ostringstream msg;
        msg << "probability at index " << index << " is " << value
            << ", expected a value strictly between 0 and 1";
        return msg.str();
      }()),
      index_(index),
      value_(value) {}

InstanceTooLarge::InstanceTooLarge(std::size_t n, std::size_t limit)
    : Error("instance of size " + std::to_string(n) +
            " exceeds the exhaustive-search limit of " + std::to_string(limit)),
      n_(n),
      limit_(limit) {}

std::string_view to_string(Procedure procedure) {
  switch (procedure) {
    case Procedure::Dorfman:
      return "D";
    case Procedure::ModifiedDorfman:
      return "Dp";
    case Procedure::Sterrett:
      return "S";
  }
  return "?";
}

Procedure parse_procedure(std::string_view name) {
  if (name == "D") return Procedure::Dorfman;
  if (name == "Dp" || name == "D'") return Procedure::ModifiedDorfman;
  if (name == "S") return Procedure::Sterrett;
  throw InputError("unknown procedure '" + std::string(name) + "' (expected D, Dp or S)");
}

ProbabilityVector ProbabilityVector::validate(std::span<const double> raw) {
  return validate(raw, {});
}

ProbabilityVector ProbabilityVector::validate(std::span<const double> raw,
                                              std::vector<std::string> ids) {
  if (raw.empty()) throw EmptyInput();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    // Also rejects NaN.
    if (!(raw[i] > 0.0 && raw[i] < 1.0)) throw OutOfRange(i, raw[i]);
  }
  if (!ids.empty() && ids.size() != raw.size()) {
    throw InputError("got " + std::to_string(ids.size()) + " ids for " +
                     std::to_string(raw.size()) + " probabilities");
  }
  ProbabilityVector pv;
  pv.probs_.assign(raw.begin(), raw.end());
  pv.ids_ = std::move(ids);
  return pv;
}

std::vector<double> ProbabilityVector::qs() const {
  std::vector<double> out(probs_.size());
  std::transform(probs_.begin(), probs_.end(), out.begin(),
                 [](double p) { return 1.0 - p; });
  return out;
}

double ProbabilityVector::min_p() const {
  return *std::min_element(probs_.begin(), probs_.end());
}

SortedPopulation sort_ascending(const ProbabilityVector& pv) {
  std::vector<std::size_t> perm(pv.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return pv.p(a) < pv.p(b); });
  std::vector<double> probs(pv.size());
  std::vector<std::string> ids;
  if (pv.has_ids()) ids.resize(pv.size());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    probs[j] = pv.p(perm[j]);
    if (pv.has_ids()) ids[j] = pv.ids()[perm[j]];
  }
  return {ProbabilityVector::validate(probs, std::move(ids)), std::move(perm)};
}

Group Group::make(std::vector<std::size_t> items, std::size_t population_size) {
  if (items.empty()) throw InputError("group is empty");
  std::vector<bool> seen(population_size, false);
  for (std::size_t item : items) {
    if (item >= population_size) {
      throw InputError("item index " + std::to_string(item + 1) +
                       " is outside the population of size " +
                       std::to_string(population_size));
    }
    if (seen[item]) {
      throw InputError("item index " + std::to_string(item + 1) + " appears twice");
    }
    seen[item] = true;
  }
  return Group(std::move(items));
}

Group Group::whole_population(std::size_t n) {
  std::vector<std::size_t> items(n);
  std::iota(items.begin(), items.end(), std::size_t{0});
  return make(std::move(items), n);
}

std::vector<double> Group::qs(const ProbabilityVector& pv) const {
  std::vector<double> out(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) out[i] = pv.q(items_[i]);
  return out;
}

OrderedPartition OrderedPartition::make(std::vector<std::size_t> sizes, std::size_t n) {
  if (sizes.empty()) throw InputError("ordered partition has no blocks");
  std::size_t total = 0;
  for (std::size_t s : sizes) {
    if (s == 0) throw InputError("ordered partition contains an empty block");
    total += s;
  }
  if (total != n) {
    throw InputError("ordered partition sizes sum to " + std::to_string(total) +
                     ", population has " + std::to_string(n) + " items");
  }
  return OrderedPartition(std::move(sizes), n);
}

OrderedPartition OrderedPartition::singletons(std::size_t n) {
  return make(std::vector<std::size_t>(n, 1), n);
}

std::vector<Group> OrderedPartition::groups(const SortedPopulation& sorted) const {
  if (sorted.permutation.size() != n_) {
    throw InputError("ordered partition covers " + std::to_string(n_) +
                     " items, population has " +
                     std::to_string(sorted.permutation.size()));
  }
  std::vector<Group> out;
  out.reserve(sizes_.size());
  std::size_t start = 0;
  for (std::size_t s : sizes_) {
    std::vector<std::size_t> items(sorted.permutation.begin() + static_cast<std::ptrdiff_t>(start),
                                   sorted.permutation.begin() + static_cast<std::ptrdiff_t>(start + s));
    out.push_back(Group::make(std::move(items), n_));
    start += s;
  }
  return out;
}

SetPartition SetPartition::make(std::vector<std::vector<std::size_t>> blocks,
                                std::size_t n) {
  if (blocks.empty()) throw InputError("set partition has no blocks");
  std::vector<bool> covered(n, false);
  std::size_t count = 0;
  for (const auto& block : blocks) {
    if (block.empty()) throw InputError("set partition contains an empty block");
    for (std::size_t item : block) {
      if (item >= n) {
        throw InputError("item index " + std::to_string(item + 1) +
                         " is outside the population of size " + std::to_string(n));
      }
      if (covered[item]) {
        throw InputError("item index " + std::to_string(item + 1) +
                         " appears in more than one block");
      }
      covered[item] = true;
      ++count;
    }
  }
  if (count != n) {
    throw InputError("set partition covers " + std::to_string(count) + " of " +
                     std::to_string(n) + " items");
  }
  return SetPartition(std::move(blocks), n);
}

std::vector<Group> SetPartition::groups() const {
  std::vector<Group> out;
  out.reserve(blocks_.size());
  for (const auto& block : blocks_) out.push_back(Group::make(block, n_));
  return out;
}

std::size_t population_size(const Plan& plan) {
  return std::visit([](const auto& p) { return p.population_size(); }, plan);
}

std::vector<Group> plan_groups(const Plan& plan, const SortedPopulation& sorted) {
  if (const auto* ordered = std::get_if<OrderedPartition>(&plan)) {
    return ordered->groups(sorted);
  }
  const auto& set = std::get<SetPartition>(plan);
  if (set.population_size() != sorted.permutation.size()) {
    throw InputError("plan covers " + std::to_string(set.population_size()) +
                     " items, population has " +
                     std::to_string(sorted.permutation.size()));
  }
  return set.groups();
}

bool nearly_equal(double a, double b, double tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

}  // namespace pooltest
