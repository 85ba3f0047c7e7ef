#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "vapep/types.hpp"

namespace vapep {

/// A ⊆ U × R stored as one resource subset per user.
class AuthorizationRelation {
 public:
  AuthorizationRelation() = default;
  explicit AuthorizationRelation(std::size_t user_count) : sets_(user_count, 0) {}
  explicit AuthorizationRelation(std::vector<ResourceSet> per_user) : sets_(std::move(per_user)) {}

  std::size_t user_count() const { return sets_.size(); }

  ResourceSet of_user(std::size_t u) const { return sets_.at(u); }
  void assign(std::size_t u, ResourceSet resources) { sets_.at(u) = resources; }
  void add(std::size_t u, int r) { sets_.at(u) |= ResourceSet{1} << r; }

  /// A(r), in increasing user order.
  std::vector<std::size_t> users_of(int r) const;

  /// |A|, the number of (user, resource) pairs.
  std::size_t pair_count() const;

  /// |A(R)|, the number of users with a non-empty assignment.
  std::size_t active_user_count() const;

  bool is_complete(int k) const;

  const std::vector<ResourceSet>& per_user() const { return sets_; }

  friend bool operator==(const AuthorizationRelation&, const AuthorizationRelation&) = default;

 private:
  std::vector<ResourceSet> sets_;
};

/// usr_A : 2^R -> N. Absent keys count zero; the empty set absorbs users
/// that hold no resource.
class UserProfile {
 public:
  UserProfile() = default;
  explicit UserProfile(int k) : k_(k) {}

  int resource_count() const { return k_; }

  std::size_t count(ResourceSet t) const;
  void set(ResourceSet t, std::size_t c);

  /// Σ_T usr(T); equals n for the profile of a relation over n users.
  std::size_t total() const;

  /// Σ_{T≠∅} usr(T).
  std::size_t assigned() const;

  /// Σ_{T∋r} usr(T) = |A(r)|.
  std::size_t coverage(int r) const;

  bool is_complete() const;

  /// Non-zero entries ordered by subset_order_less.
  std::vector<std::pair<ResourceSet, std::size_t>> entries() const;

  friend bool operator==(const UserProfile& a, const UserProfile& b) {
    return a.k_ == b.k_ && a.entries() == b.entries();
  }

 private:
  int k_ = 0;
  std::map<ResourceSet, std::size_t> counts_;
};

UserProfile profile_of(const AuthorizationRelation& a, int k);

}  // namespace vapep
