#include "vapep/model.hpp"

#include <algorithm>
#include <unordered_set>

namespace vapep {

// ---------------------------------------------------------------------------
// AuthorizationRelation / UserProfile

std::vector<std::size_t> AuthorizationRelation::users_of(int r) const {
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < sets_.size(); ++u) {
    if (contains(sets_[u], r)) out.push_back(u);
  }
  return out;
}

std::size_t AuthorizationRelation::pair_count() const {
  std::size_t total = 0;
  for (ResourceSet s : sets_) total += static_cast<std::size_t>(popcount(s));
  return total;
}

std::size_t AuthorizationRelation::active_user_count() const {
  return static_cast<std::size_t>(std::count_if(sets_.begin(), sets_.end(), [](ResourceSet s) { return s != 0; }));
}

bool AuthorizationRelation::is_complete(int k) const {
  ResourceSet covered = 0;
  for (ResourceSet s : sets_) covered |= s;
  return (covered & full_set(k)) == full_set(k);
}

std::size_t UserProfile::count(ResourceSet t) const {
  auto it = counts_.find(t);
  return it == counts_.end() ? 0 : it->second;
}

void UserProfile::set(ResourceSet t, std::size_t c) {
  if ((t & ~full_set(k_)) != 0) {
    throw DomainError("UserProfile::set: subset " + format_set(t) + " outside the resource universe");
  }
  if (c == 0) {
    counts_.erase(t);
  } else {
    counts_[t] = c;
  }
}

std::size_t UserProfile::total() const {
  std::size_t out = 0;
  for (const auto& [t, c] : counts_) out += c;
  return out;
}

std::size_t UserProfile::assigned() const { return total() - count(0); }

std::size_t UserProfile::coverage(int r) const {
  std::size_t out = 0;
  for (const auto& [t, c] : counts_) {
    if (contains(t, r)) out += c;
  }
  return out;
}

bool UserProfile::is_complete() const {
  for (int r = 0; r < k_; ++r) {
    if (coverage(r) == 0) return false;
  }
  return true;
}

std::vector<std::pair<ResourceSet, std::size_t>> UserProfile::entries() const {
  std::vector<std::pair<ResourceSet, std::size_t>> out(counts_.begin(), counts_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return subset_order_less(a.first, b.first); });
  return out;
}

UserProfile profile_of(const AuthorizationRelation& a, int k) {
  UserProfile usr(k);
  for (ResourceSet s : a.per_user()) usr.set(s, usr.count(s) + 1);
  return usr;
}

// ---------------------------------------------------------------------------
// AuthCost

AuthCost::AuthCost(std::vector<ResourceSet> base, Weight uniform_penalty)
    : base_(std::move(base)), uniform_(uniform_penalty) {
  if (uniform_penalty < 0) throw DomainError("AuthCost: pair penalty must be non-negative");
}

AuthCost::AuthCost(std::vector<ResourceSet> base, std::vector<std::vector<Weight>> pair_penalty)
    : base_(std::move(base)), matrix_(std::move(pair_penalty)) {
  if (matrix_.size() != base_.size()) {
    throw DomainError("AuthCost: penalty matrix needs one row per user");
  }
  for (const auto& row : matrix_) {
    for (Weight p : row) {
      if (p < 0) throw DomainError("AuthCost: pair penalty must be non-negative");
    }
  }
}

AuthCost AuthCost::custom(std::size_t user_count, int k, std::function<Weight(std::size_t, ResourceSet)> fn) {
  if (!fn) throw DomainError("AuthCost::custom: empty function");
  AuthCost out;
  out.custom_ = std::move(fn);
  out.base_.assign(user_count, 0);
  for (std::size_t u = 0; u < user_count; ++u) {
    if (out.custom_(u, 0) != 0) throw DomainError("AuthCost::custom: omega(u, {}) must be 0");
    for (int r = 0; r < k; ++r) {
      if (out.custom_(u, ResourceSet{1} << r) == 0) out.base_[u] |= ResourceSet{1} << r;
    }
  }
  return out;
}

Weight AuthCost::pair_penalty(std::size_t u, int r) const {
  if (custom_) return custom_(u, ResourceSet{1} << r);
  if (contains(base_.at(u), r)) return 0;
  if (!matrix_.empty()) return matrix_.at(u).at(static_cast<std::size_t>(r));
  return uniform_;
}

Weight AuthCost::omega(std::size_t u, ResourceSet t) const {
  if (custom_) return custom_(u, t);
  const ResourceSet unauthorized = t & ~base_.at(u);
  if (unauthorized == 0) return 0;
  if (matrix_.empty()) return checked_mul(uniform_, popcount(unauthorized));
  Weight out = 0;
  const auto& row = matrix_.at(u);
  for (int r = 0; r < 32; ++r) {
    if (contains(unauthorized, r)) out = checked_add(out, row.at(static_cast<std::size_t>(r)));
  }
  return out;
}

std::vector<std::size_t> AuthCost::user_classes() const {
  std::vector<std::size_t> cls(base_.size());
  if (custom_) {
    for (std::size_t u = 0; u < cls.size(); ++u) cls[u] = u;
    return cls;
  }
  // Users with the same base set and the same penalty row have identical ω.
  std::vector<std::size_t> representative;
  for (std::size_t u = 0; u < base_.size(); ++u) {
    std::size_t found = representative.size();
    for (std::size_t c = 0; c < representative.size(); ++c) {
      const std::size_t v = representative[c];
      if (base_[v] == base_[u] && (matrix_.empty() || matrix_[v] == matrix_[u])) {
        found = c;
        break;
      }
    }
    if (found == representative.size()) representative.push_back(u);
    cls[u] = found;
  }
  return cls;
}

void AuthCost::validate(std::size_t user_count, int k) const {
  if (base_.size() != user_count) {
    throw DomainError("AuthCost: expected " + std::to_string(user_count) + " users, got " +
                      std::to_string(base_.size()));
  }
  for (ResourceSet s : base_) {
    if ((s & ~full_set(k)) != 0) throw DomainError("AuthCost: base set references an unknown resource");
  }
  for (const auto& row : matrix_) {
    if (row.size() != static_cast<std::size_t>(k)) {
      throw DomainError("AuthCost: penalty matrix rows need one entry per resource");
    }
  }
}

// ---------------------------------------------------------------------------
// Instance

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw DomainError(std::string("duplicate ") + what + " identifier '" + id + "'");
  }
}

}  // namespace

Instance::Instance(std::vector<std::string> users, std::vector<std::string> resources,
                   std::vector<WeightedConstraint> constraints, AuthCost auth)
    : users_(std::move(users)),
      resources_(std::move(resources)),
      constraints_(std::move(constraints)),
      auth_(std::move(auth)) {
  if (resources_.empty() || resources_.size() > static_cast<std::size_t>(kMaxResources)) {
    throw DomainError("instance needs between 1 and 30 resources, got " + std::to_string(resources_.size()));
  }
  if (users_.empty()) throw DomainError("instance needs at least one user");
  require_unique(users_, "user");
  require_unique(resources_, "resource");
  for (const auto& c : constraints_) validate_constraint(c, k());
  auth_.validate(n(), k());
}

std::size_t Instance::user_index(std::string_view name) const {
  auto it = std::find(users_.begin(), users_.end(), name);
  if (it == users_.end()) throw DomainError("unknown user '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - users_.begin());
}

int Instance::resource_index(std::string_view name) const {
  auto it = std::find(resources_.begin(), resources_.end(), name);
  if (it == resources_.end()) throw DomainError("unknown resource '" + std::string(name) + "'");
  return static_cast<int>(it - resources_.begin());
}

void Instance::check_relation(const AuthorizationRelation& a) const {
  if (a.user_count() != n()) {
    throw DomainError("relation covers " + std::to_string(a.user_count()) + " users, instance has " +
                      std::to_string(n()));
  }
  for (ResourceSet s : a.per_user()) {
    if ((s & ~all_resources()) != 0) throw DomainError("relation references an unknown resource");
  }
}

// ---------------------------------------------------------------------------
// Weights

Weight omega(const Instance& inst, std::size_t u, ResourceSet t) {
  if (u >= inst.n()) throw DomainError("omega: unknown user index " + std::to_string(u));
  if ((t & ~inst.all_resources()) != 0) throw DomainError("omega: subset " + format_set(t) + " has unknown resources");
  return inst.auth().omega(u, t);
}

Weight big_omega(const Instance& inst, const AuthorizationRelation& a) {
  inst.check_relation(a);
  Weight out = 0;
  for (std::size_t u = 0; u < a.user_count(); ++u) out = checked_add(out, inst.auth().omega(u, a.of_user(u)));
  return out;
}

Weight WeightBreakdown::category(ConstraintCategory cat) const {
  Weight out = 0;
  for (std::size_t i = 0; i < per_constraint.size(); ++i) {
    if (categories[i] == cat) out = checked_add(out, per_constraint[i]);
  }
  return out;
}

WeightBreakdown total_weight(const Instance& inst, const AuthorizationRelation& a) {
  WeightBreakdown out;
  out.authorizations = big_omega(inst, a);
  out.total = out.authorizations;
  out.per_constraint.reserve(inst.constraints().size());
  for (const auto& c : inst.constraints()) {
    const Weight w = eval_relation(c, a, inst.k());
    out.per_constraint.push_back(w);
    out.categories.push_back(category_of(c));
    out.total = checked_add(out.total, w);
  }
  return out;
}

UserProfile profile_of(const Instance& inst, const AuthorizationRelation& a) {
  inst.check_relation(a);
  return profile_of(a, inst.k());
}

SolveResult::SolveResult(const Instance& inst, AuthorizationRelation relation, SolveMeta meta)
    : relation_(std::move(relation)), breakdown_(vapep::total_weight(inst, relation_)), meta_(std::move(meta)) {
  if (!relation_.is_complete(inst.k())) throw InfeasibleError("SolveResult: relation is not complete");
}

}  // namespace vapep
