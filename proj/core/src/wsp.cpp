#include "vapep/wsp.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "user_pool.hpp"
#include "vapep/partitions.hpp"

namespace vapep {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_step(int s, int size) {
  if (s < 0 || s >= size) {
    throw DomainError("wsp constraint: step index " + std::to_string(s) + " outside [0, " + std::to_string(size) + ")");
  }
}

std::vector<int> identity(int size) {
  std::vector<int> out(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

}  // namespace

WspInstance::WspInstance(std::vector<std::string> steps, std::vector<std::string> users,
                         std::vector<WspConstraint> constraints, AuthCost auth)
    : WspInstance(steps, std::move(users), std::move(constraints), std::move(auth),
                  identity(static_cast<int>(steps.size())), static_cast<int>(steps.size())) {}

WspInstance::WspInstance(std::vector<std::string> steps, std::vector<std::string> users,
                         std::vector<WspConstraint> constraints, AuthCost auth, std::vector<int> step_group,
                         int group_count)
    : steps_(std::move(steps)),
      users_(std::move(users)),
      constraints_(std::move(constraints)),
      auth_(std::move(auth)),
      step_group_(std::move(step_group)),
      group_count_(group_count) {
  const int size = step_count();
  if (size < 1 || size > kMaxResources) throw DomainError("wsp: step count must lie in [1, 30]");
  if (users_.empty()) throw DomainError("wsp: at least one user is required");
  if (std::set<std::string>(steps_.begin(), steps_.end()).size() != steps_.size()) {
    throw DomainError("wsp: duplicate step identifier");
  }
  if (std::set<std::string>(users_.begin(), users_.end()).size() != users_.size()) {
    throw DomainError("wsp: duplicate user identifier");
  }
  if (group_count_ < 1 || group_count_ > kMaxResources) throw DomainError("wsp: group count must lie in [1, 30]");
  if (step_group_.size() != steps_.size()) throw DomainError("wsp: step_group must list every step");
  for (int g : step_group_) {
    if (g < 0 || g >= group_count_) throw DomainError("wsp: step group outside the authorization universe");
  }
  auth_.validate(users_.size(), group_count_);
  for (const auto& c : constraints_) {
    std::visit(overloaded{
                   [&](const MustEqual& x) {
                     check_step(x.s1, size);
                     check_step(x.s2, size);
                     if (x.s1 == x.s2) throw DomainError("must_equal: the two steps must differ");
                     if (x.penalty < 1) throw DomainError("must_equal: penalty must be positive");
                   },
                   [&](const MustDiffer& x) {
                     check_step(x.s1, size);
                     check_step(x.s2, size);
                     if (x.s1 == x.s2) throw DomainError("must_differ: the two steps must differ");
                     if (x.penalty < 1) throw DomainError("must_differ: penalty must be positive");
                   },
                   [&](const DisjointSets& x) {
                     if (x.left.empty() || x.right.empty()) throw DomainError("disjoint_sets: empty step set");
                     for (int s : x.left) check_step(s, size);
                     for (int s : x.right) check_step(s, size);
                   },
               },
               c);
  }
}

bool WspInstance::has_identity_groups() const {
  return group_count_ == step_count() && step_group_ == identity(step_count());
}

ResourceSet WspInstance::groups_of(ResourceSet steps) const {
  ResourceSet out = 0;
  for (int s = 0; s < step_count(); ++s) {
    if (contains(steps, s)) out |= ResourceSet{1} << step_group_[static_cast<std::size_t>(s)];
  }
  return out;
}

int WspInstance::step_index(const std::string& name) const {
  const auto it = std::find(steps_.begin(), steps_.end(), name);
  if (it == steps_.end()) throw DomainError("unknown step '" + name + "'");
  return static_cast<int>(it - steps_.begin());
}

std::size_t WspInstance::user_index(const std::string& name) const {
  const auto it = std::find(users_.begin(), users_.end(), name);
  if (it == users_.end()) throw DomainError("unknown user '" + name + "'");
  return static_cast<std::size_t>(it - users_.begin());
}

Weight eval_wsp_constraint(const WspConstraint& c, const Plan& plan) {
  return std::visit(overloaded{
                        [&](const MustEqual& x) { return plan.at(x.s1) != plan.at(x.s2) ? x.penalty : 0; },
                        [&](const MustDiffer& x) { return plan.at(x.s1) == plan.at(x.s2) ? x.penalty : 0; },
                        [&](const DisjointSets& x) {
                          std::set<std::size_t> left;
                          std::set<std::size_t> both;
                          for (int s : x.left) left.insert(plan.at(s));
                          for (int s : x.right) {
                            if (left.count(plan.at(s))) both.insert(plan.at(s));
                          }
                          return x.f(static_cast<std::int64_t>(both.size()));
                        },
                    },
                    c);
}

Weight eval_wsp_constraint_on_partition(const WspConstraint& c, const std::vector<int>& block_of) {
  return std::visit(overloaded{
                        [&](const MustEqual& x) { return block_of.at(x.s1) != block_of.at(x.s2) ? x.penalty : 0; },
                        [&](const MustDiffer& x) { return block_of.at(x.s1) == block_of.at(x.s2) ? x.penalty : 0; },
                        [&](const DisjointSets& x) {
                          std::uint64_t left = 0;
                          std::uint64_t both = 0;
                          for (int s : x.left) left |= std::uint64_t{1} << block_of.at(s);
                          for (int s : x.right) both |= left & (std::uint64_t{1} << block_of.at(s));
                          return x.f(std::popcount(both));
                        },
                    },
                    c);
}

WspWeight plan_weight(const WspInstance& w, const Plan& plan) {
  if (plan.size() != static_cast<std::size_t>(w.step_count())) throw DomainError("plan must map every step");
  std::vector<ResourceSet> steps_of(w.n(), 0);
  for (std::size_t s = 0; s < plan.size(); ++s) {
    if (plan[s] >= w.n()) throw DomainError("plan references an unknown user");
    steps_of[plan[s]] |= ResourceSet{1} << s;
  }
  WspWeight out;
  for (std::size_t u = 0; u < w.n(); ++u) out.authorizations = checked_add(out.authorizations, w.omega(u, steps_of[u]));
  for (const auto& c : w.constraints()) out.constraints = checked_add(out.constraints, eval_wsp_constraint(c, plan));
  out.total = checked_add(out.authorizations, out.constraints);
  return out;
}

WspSolution solve_wsp(const WspInstance& w) {
  const int size = w.step_count();
  if (size > kMaxWspSteps) {
    throw GuardError("wsp solver: " + std::to_string(size) + " steps exceeds the bound of 12 (Bell(12) = " +
                     std::to_string(bell_number(kMaxWspSteps)) + " partitions)");
  }
  detail::UserPool pool(w.auth().user_classes(), [&w](std::size_t u, ResourceSet t) { return w.omega(u, t); });

  WspSolution out;
  Weight best = std::numeric_limits<Weight>::max();
  std::vector<ResourceSet> best_blocks;
  std::vector<int> block_of(static_cast<std::size_t>(size));
  for_each_partition(size, [&](const Partition& p) {
    ++out.partitions;
    if (p.blocks.size() > w.n()) return true;
    for (int s = 0; s < size; ++s) block_of[static_cast<std::size_t>(s)] = p.rgs[static_cast<std::size_t>(s)];
    Weight bound = 0;
    for (const auto& c : w.constraints()) bound = checked_add(bound, eval_wsp_constraint_on_partition(c, block_of));
    const Weight constraint_weight = bound;
    for (ResourceSet b : p.blocks) bound = checked_add(bound, pool.min_cost(b));
    if (bound >= best) return true;
    ++out.matchings;
    const Weight total = checked_add(constraint_weight, pool.value(p.blocks));
    if (total < best) {
      best = total;
      best_blocks = p.blocks;
    }
    return true;
  });
  if (best_blocks.empty()) throw InfeasibleError("wsp solver: no plan fits the available users");

  const auto users = pool.assign(best_blocks, nullptr);
  out.plan.assign(static_cast<std::size_t>(size), 0);
  for (std::size_t b = 0; b < best_blocks.size(); ++b) {
    for (int s = 0; s < size; ++s) {
      if (contains(best_blocks[b], s)) out.plan[static_cast<std::size_t>(s)] = users[b];
    }
  }
  out.weight = plan_weight(w, out.plan);
  if (out.weight.total != best) throw std::logic_error("wsp solver: recomputed plan weight differs from search value");
  return out;
}

WspReduction reduce_sodu_bodu(const Instance& apep) {
  std::vector<WspConstraint> cons;
  for (const auto& c : apep.constraints()) {
    if (const auto* x = std::get_if<SodU>(&c)) {
      cons.push_back(MustDiffer{x->r1, x->r2, x->f(1)});
    } else if (const auto* y = std::get_if<BodU>(&c)) {
      cons.push_back(MustEqual{y->r1, y->r2, y->f(1)});
    } else {
      throw DomainError("reduce_sodu_bodu: unsupported constraint family " + family_name(c));
    }
  }
  const int k = apep.k();
  WspReduction out{WspInstance(apep.resources(), apep.users(), std::move(cons), apep.auth(), identity(k), k),
                   identity(k), k};
  return out;
}

WspReduction reduce_bode_sodu(const Instance& apep) {
  const int k = apep.k();
  std::vector<std::set<int>> gamma(static_cast<std::size_t>(k));
  for (const auto& c : apep.constraints()) {
    if (const auto* x = std::get_if<BodE>(&c)) {
      gamma[static_cast<std::size_t>(x->r1)].insert(x->r2);
      gamma[static_cast<std::size_t>(x->r2)].insert(x->r1);
    } else if (!std::holds_alternative<SodU>(c)) {
      throw DomainError("reduce_bode_sodu: unsupported constraint family " + family_name(c));
    }
  }

  std::vector<std::string> names;
  std::vector<int> origin;
  std::vector<std::vector<int>> group_steps(static_cast<std::size_t>(k));  // S^i
  std::vector<std::vector<int>> endpoint(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), -1));
  for (int i = 0; i < k; ++i) {
    const auto& g = gamma[static_cast<std::size_t>(i)];
    if (g.empty()) {
      group_steps[static_cast<std::size_t>(i)].push_back(static_cast<int>(names.size()));
      names.push_back("s" + std::to_string(i + 1));
      origin.push_back(i);
      continue;
    }
    for (int j : g) {
      endpoint[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<int>(names.size());
      group_steps[static_cast<std::size_t>(i)].push_back(static_cast<int>(names.size()));
      names.push_back("s" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
      origin.push_back(i);
    }
  }

  std::vector<WspConstraint> cons;
  for (const auto& c : apep.constraints()) {
    if (const auto* x = std::get_if<BodE>(&c)) {
      cons.push_back(MustEqual{endpoint[static_cast<std::size_t>(x->r1)][static_cast<std::size_t>(x->r2)],
                               endpoint[static_cast<std::size_t>(x->r2)][static_cast<std::size_t>(x->r1)], x->ell});
    } else {
      const auto& y = std::get<SodU>(c);
      cons.push_back(DisjointSets{group_steps[static_cast<std::size_t>(y.r1)],
                                  group_steps[static_cast<std::size_t>(y.r2)], y.f});
    }
  }
  if (static_cast<int>(names.size()) > kMaxResources) {
    throw DomainError("reduce_bode_sodu: reduction needs " + std::to_string(names.size()) + " steps, limit is 30");
  }
  return WspReduction{WspInstance(names, apep.users(), std::move(cons), apep.auth(), origin, k), origin, k};
}

AuthorizationRelation lift_plan(const WspReduction& reduction, const Plan& plan) {
  if (plan.size() != reduction.step_resource.size()) throw DomainError("lift_plan: plan does not match the reduction");
  AuthorizationRelation a(reduction.wsp.n());
  for (std::size_t s = 0; s < plan.size(); ++s) {
    if (plan[s] >= reduction.wsp.n()) throw DomainError("lift_plan: plan references an unknown user");
    a.add(plan[s], reduction.step_resource[s]);
  }
  return a;
}

}  // namespace vapep
