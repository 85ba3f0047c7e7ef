#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "vapep/constraints.hpp"
#include "vapep/model.hpp"
#include "vapep/types.hpp"

namespace vapep {

/// (s1, s2, =): penalty when the two steps get different users.
struct MustEqual {
  int s1 = 0;
  int s2 = 0;
  Weight penalty = 1;
};

/// (s1, s2, ≠): penalty when both steps get the same user.
struct MustDiffer {
  int s1 = 0;
  int s2 = 0;
  Weight penalty = 1;
};

/// (S_i, S_j, ∅): f(|π(S_i) ∩ π(S_j)|).
struct DisjointSets {
  std::vector<int> left;
  std::vector<int> right;
  PenaltySpec f = PenaltySpec::linear(1);
};

using WspConstraint = std::variant<MustEqual, MustDiffer, DisjointSets>;

/// Valued WSP instance. Authorization costs live on a universe of "groups":
/// step s belongs to group step_group[s], and a user handed the steps T pays
/// ω'(u, T) = auth.omega(u, {step_group[s] : s ∈ T}). A plain instance uses
/// one group per step.
class WspInstance {
 public:
  WspInstance(std::vector<std::string> steps, std::vector<std::string> users, std::vector<WspConstraint> constraints,
              AuthCost auth);
  WspInstance(std::vector<std::string> steps, std::vector<std::string> users, std::vector<WspConstraint> constraints,
              AuthCost auth, std::vector<int> step_group, int group_count);

  int step_count() const { return static_cast<int>(steps_.size()); }
  std::size_t n() const { return users_.size(); }
  const std::vector<std::string>& steps() const { return steps_; }
  const std::vector<std::string>& users() const { return users_; }
  const std::vector<WspConstraint>& constraints() const { return constraints_; }
  const AuthCost& auth() const { return auth_; }
  const std::vector<int>& step_group() const { return step_group_; }
  int group_count() const { return group_count_; }
  bool has_identity_groups() const;

  /// Groups touched by a step set.
  ResourceSet groups_of(ResourceSet steps) const;
  Weight omega(std::size_t u, ResourceSet steps) const { return auth_.omega(u, groups_of(steps)); }
  /// Whether user u may perform step s at no cost.
  bool authorized(std::size_t u, int s) const { return omega(u, ResourceSet{1} << s) == 0; }

  int step_index(const std::string& name) const;
  std::size_t user_index(const std::string& name) const;

 private:
  std::vector<std::string> steps_;
  std::vector<std::string> users_;
  std::vector<WspConstraint> constraints_;
  AuthCost auth_;
  std::vector<int> step_group_;
  int group_count_ = 0;
};

/// Total map step -> user index.
using Plan = std::vector<std::size_t>;

struct WspWeight {
  Weight constraints = 0;
  Weight authorizations = 0;
  Weight total = 0;
};

/// Weight of one constraint under a plan, straight from the definition.
Weight eval_wsp_constraint(const WspConstraint& c, const Plan& plan);

/// Weight of a plan computed from the plan itself.
WspWeight plan_weight(const WspInstance& w, const Plan& plan);

/// Weight of one constraint from a partition of the steps into blocks that go
/// to pairwise distinct users (`block_of[s]` is the block of step s).
Weight eval_wsp_constraint_on_partition(const WspConstraint& c, const std::vector<int>& block_of);

inline constexpr int kMaxWspSteps = 12;

struct WspSolution {
  Plan plan;
  WspWeight weight;
  std::uint64_t partitions = 0;
  std::uint64_t matchings = 0;
};

/// Exact minimum over all plans: partitions of the steps in restricted-growth
/// order, each priced by constraint weight plus an injective block -> user
/// matching. Throws GuardError beyond kMaxWspSteps steps and
/// InfeasibleError when no plan exists (never, since n >= 1).
WspSolution solve_wsp(const WspInstance& w);

/// WSP instance plus the resource every step came from.
struct WspReduction {
  WspInstance wsp;
  std::vector<int> step_resource;
  int resource_count = 0;
};

/// SoD_U / BoD_U instance -> Valued WSP(=, ≠) on the same steps. Throws
/// DomainError for any other family.
WspReduction reduce_sodu_bodu(const Instance& apep);

/// BoD_E / SoD_U instance -> Valued WSP with one step per BoD_E endpoint.
/// Throws DomainError for any other family.
WspReduction reduce_bode_sodu(const Instance& apep);

/// A(r) = π(S^r) for every resource r.
AuthorizationRelation lift_plan(const WspReduction& reduction, const Plan& plan);

}  // namespace vapep
