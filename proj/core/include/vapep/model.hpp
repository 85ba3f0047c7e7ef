#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "vapep/constraints.hpp"
#include "vapep/relation.hpp"
#include "vapep/types.hpp"

namespace vapep {

/// Weighted user authorization function ω.
///
/// The additive form charges pair_penalty(u, r) for every r ∈ T outside the
/// base set of u, so ω(u, T) = 0 iff T ⊆ base(u). A custom hook accepts any
/// monotone ω with ω(u, ∅) = 0; its base sets are read off as the resources
/// r with ω(u, {r}) = 0.
class AuthCost {
 public:
  AuthCost() = default;
  AuthCost(std::vector<ResourceSet> base, Weight uniform_penalty);
  /// `pair_penalty` is n × k, indexed [user][resource].
  AuthCost(std::vector<ResourceSet> base, std::vector<std::vector<Weight>> pair_penalty);

  static AuthCost custom(std::size_t user_count, int k, std::function<Weight(std::size_t, ResourceSet)> fn);

  Weight omega(std::size_t u, ResourceSet t) const;
  Weight pair_penalty(std::size_t u, int r) const;
  ResourceSet base(std::size_t u) const { return base_.at(u); }
  const std::vector<ResourceSet>& base_sets() const { return base_; }

  std::size_t user_count() const { return base_.size(); }
  bool is_custom() const { return static_cast<bool>(custom_); }
  bool has_matrix() const { return !matrix_.empty(); }
  Weight uniform_penalty() const { return uniform_; }
  const std::vector<std::vector<Weight>>& matrix() const { return matrix_; }

  /// Class id per user; users sharing an id have identical ω on every subset.
  /// Custom hooks put every user in its own class.
  std::vector<std::size_t> user_classes() const;

  void validate(std::size_t user_count, int k) const;

 private:
  std::vector<ResourceSet> base_;
  Weight uniform_ = 1;
  std::vector<std::vector<Weight>> matrix_;
  std::function<Weight(std::size_t, ResourceSet)> custom_;
};

/// (R, U, C, ω). Immutable after construction.
class Instance {
 public:
  Instance(std::vector<std::string> users, std::vector<std::string> resources,
           std::vector<WeightedConstraint> constraints, AuthCost auth);

  std::size_t n() const { return users_.size(); }
  int k() const { return static_cast<int>(resources_.size()); }
  ResourceSet all_resources() const { return full_set(k()); }

  const std::vector<std::string>& users() const { return users_; }
  const std::vector<std::string>& resources() const { return resources_; }
  const std::vector<WeightedConstraint>& constraints() const { return constraints_; }
  const AuthCost& auth() const { return auth_; }

  std::size_t user_index(std::string_view name) const;
  int resource_index(std::string_view name) const;

  /// Throws DomainError unless `a` is shaped for this instance.
  void check_relation(const AuthorizationRelation& a) const;

 private:
  std::vector<std::string> users_;
  std::vector<std::string> resources_;
  std::vector<WeightedConstraint> constraints_;
  AuthCost auth_;
};

Weight omega(const Instance& inst, std::size_t u, ResourceSet t);

/// Ω(A) = Σ_u ω(u, A(u)).
Weight big_omega(const Instance& inst, const AuthorizationRelation& a);

struct WeightBreakdown {
  std::vector<Weight> per_constraint;
  std::vector<ConstraintCategory> categories;
  Weight authorizations = 0;
  Weight total = 0;

  Weight category(ConstraintCategory cat) const;
};

/// w(A) = Ω(A) + Σ_c w_c(A), with every term listed.
WeightBreakdown total_weight(const Instance& inst, const AuthorizationRelation& a);

UserProfile profile_of(const Instance& inst, const AuthorizationRelation& a);

struct SolveMeta {
  std::string solver;
  std::size_t user_cap = 0;
  std::uint64_t profiles_enumerated = 0;
  std::uint64_t matchings = 0;
  double wall_ms = 0.0;
};

/// A complete relation with its weight recomputed from scratch on
/// construction, so the reported total never trusts the solver's own sum.
class SolveResult {
 public:
  SolveResult(const Instance& inst, AuthorizationRelation relation, SolveMeta meta);

  const AuthorizationRelation& relation() const { return relation_; }
  Weight total_weight() const { return breakdown_.total; }
  const WeightBreakdown& breakdown() const { return breakdown_; }
  const SolveMeta& meta() const { return meta_; }
  SolveMeta& meta() { return meta_; }

 private:
  AuthorizationRelation relation_;
  WeightBreakdown breakdown_;
  SolveMeta meta_;
};

}  // namespace vapep
