#pragma once

// Internal: users grouped into interchangeable classes so matchings only see
// the few columns that can matter.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <unordered_map>
#include <optional>
#include <vector>

#include "vapep/matching.hpp"
#include "vapep/model.hpp"

namespace vapep::detail {

class UserPool {
 public:
  /// `omega(u, set)` is the cost of giving `set` to user u.
  UserPool(std::vector<std::size_t> user_class, std::function<Weight(std::size_t, ResourceSet)> omega)
      : class_of_(std::move(user_class)), omega_(std::move(omega)) {
    std::size_t classes = 0;
    for (std::size_t c : class_of_) classes = std::max(classes, c + 1);
    members_.resize(classes);
    for (std::size_t u = 0; u < class_of_.size(); ++u) members_[class_of_[u]].push_back(u);
  }

  std::size_t user_count() const { return class_of_.size(); }
  std::size_t class_count() const { return members_.size(); }
  std::size_t class_size(std::size_t c) const { return members_[c].size(); }

  /// Users that can appear in a lexicographically smallest optimal matching
  /// with `slots` rows: the first `slots` members of every class, ascending.
  const std::vector<std::size_t>& columns(std::size_t slots) {
    if (slots >= columns_cache_.size()) columns_cache_.resize(slots + 1);
    auto& entry = columns_cache_[slots];
    if (!entry) {
      std::vector<std::size_t> cols;
      for (const auto& m : members_) {
        const std::size_t take = std::min(m.size(), slots);
        cols.insert(cols.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(take));
      }
      std::sort(cols.begin(), cols.end());
      entry = std::move(cols);
    }
    return *entry;
  }

  Weight cost(std::size_t user, ResourceSet set) const { return omega_(user, set); }

  /// Cost matrix for the slot list against columns(slots.size()).
  CostMatrix matrix(const std::vector<ResourceSet>& slot_sets) {
    const auto& cols = columns(slot_sets.size());
    CostMatrix m(slot_sets.size(), cols.size());
    for (std::size_t i = 0; i < slot_sets.size(); ++i) {
      const auto& row = class_costs(slot_sets[i]);
      for (std::size_t j = 0; j < cols.size(); ++j) m.at(i, j) = row[class_of_[cols[j]]];
    }
    return m;
  }

  /// Lexicographically smallest optimal slot -> user map.
  std::vector<std::size_t> assign(const std::vector<ResourceSet>& slot_sets, Weight* total) {
    if (slot_sets.size() > user_count()) throw InfeasibleError("more slots than users");
    const CostMatrix m = matrix(slot_sets);
    const Assignment a = min_cost_assignment(m);
    const auto& cols = columns(slot_sets.size());
    std::vector<std::size_t> users(slot_sets.size());
    for (std::size_t i = 0; i < users.size(); ++i) users[i] = cols[a.user_of_slot[i]];
    if (total != nullptr) *total = a.total;
    return users;
  }

  Weight value(const std::vector<ResourceSet>& slot_sets) {
    if (slot_sets.size() > user_count()) throw InfeasibleError("more slots than users");
    return min_cost_value(matrix(slot_sets));
  }

  /// omega of each class representative for `set`.
  const std::vector<Weight>& class_costs(ResourceSet set) {
    auto it = class_cost_cache_.find(set);
    if (it == class_cost_cache_.end()) {
      std::vector<Weight> row(members_.size());
      for (std::size_t c = 0; c < members_.size(); ++c) row[c] = omega_(members_[c].front(), set);
      it = class_cost_cache_.emplace(set, std::move(row)).first;
    }
    return it->second;
  }

  /// The `limit` smallest omega(u, set) over distinct users, ascending.
  std::vector<Weight> smallest_costs(ResourceSet set, std::size_t limit) {
    const auto& row = class_costs(set);
    std::vector<std::size_t> order(row.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    std::vector<Weight> out;
    for (std::size_t c : order) {
      for (std::size_t i = 0; i < members_[c].size() && out.size() < limit; ++i) out.push_back(row[c]);
      if (out.size() == limit) break;
    }
    return out;
  }

  /// min_u omega(u, set).
  Weight min_cost(ResourceSet set) {
    const auto& row = class_costs(set);
    return row.empty() ? 0 : *std::min_element(row.begin(), row.end());
  }

 private:
  std::vector<std::size_t> class_of_;
  std::function<Weight(std::size_t, ResourceSet)> omega_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::optional<std::vector<std::size_t>>> columns_cache_;
  std::unordered_map<ResourceSet, std::vector<Weight>> class_cost_cache_;
};

}  // namespace vapep::detail
