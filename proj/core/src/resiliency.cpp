#include "vapep/resiliency.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <numeric>

namespace vapep {

Instance encode_resilient(const WspInstance& wsp, int tau, const ResilienceEncoding& enc) {
  if (tau < 0) throw DomainError("encode_resilient: tau must be non-negative");
  if (!wsp.has_identity_groups()) throw DomainError("encode_resilient: wsp must authorize steps directly");
  const int k = wsp.step_count();
  std::vector<WeightedConstraint> cons;
  for (const auto& c : wsp.constraints()) {
    const auto* sod = std::get_if<MustDiffer>(&c);
    if (sod == nullptr) throw DomainError("encode_resilient: only separation-of-duty constraints can be encoded");
    cons.push_back(SodU{sod->s1, sod->s2, PenaltySpec::linear(enc.p_sod)});
  }
  for (int r = 0; r < k; ++r) cons.push_back(CardLB{r, tau + 1, PenaltySpec::linear(enc.p_card)});
  cons.push_back(UserCount{UserCount::Shape::quadratic, enc.user_count_coef});
  return Instance(wsp.users(), wsp.steps(), std::move(cons), AuthCost(wsp.auth().base_sets(), enc.p_auth));
}

ExtendedPlan plan_from_relation(const AuthorizationRelation& a, int step_count) {
  ExtendedPlan out(static_cast<std::size_t>(step_count));
  for (int s = 0; s < step_count; ++s) out[static_cast<std::size_t>(s)] = a.users_of(s);
  return out;
}

namespace {

class PlanSearch {
 public:
  PlanSearch(const WspInstance& wsp, const ExtendedPlan& allowed) : wsp_(wsp) {
    const auto size = static_cast<std::size_t>(wsp.step_count());
    if (allowed.size() != size) throw DomainError("extended plan must list every step");
    candidates_.resize(size);
    for (std::size_t s = 0; s < size; ++s) {
      for (std::size_t u : allowed[s]) {
        if (u >= wsp.n()) throw DomainError("extended plan references an unknown user");
        if (wsp.authorized(u, static_cast<int>(s))) candidates_[s].push_back(u);
      }
      std::sort(candidates_[s].begin(), candidates_[s].end());
      candidates_[s].erase(std::unique(candidates_[s].begin(), candidates_[s].end()), candidates_[s].end());
    }
    // Fail-first: steps with the fewest candidates go first.
    order_.resize(size);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return candidates_[a].size() < candidates_[b].size(); });
    plan_.assign(size, 0);
    assigned_.assign(size, false);
  }

  bool run() { return place(0); }

 private:
  /// No constraint whose steps are all assigned is violated.
  bool consistent() const {
    for (const auto& c : wsp_.constraints()) {
      bool ready = true;
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, DisjointSets>) {
              for (int s : x.left) ready = ready && assigned_[static_cast<std::size_t>(s)];
              for (int s : x.right) ready = ready && assigned_[static_cast<std::size_t>(s)];
            } else {
              ready = assigned_[static_cast<std::size_t>(x.s1)] && assigned_[static_cast<std::size_t>(x.s2)];
            }
          },
          c);
      if (ready && eval_wsp_constraint(c, plan_) != 0) return false;
    }
    return true;
  }

  bool place(std::size_t depth) {
    if (depth == order_.size()) return plan_weight(wsp_, plan_).total == 0;
    const std::size_t s = order_[depth];
    assigned_[s] = true;
    for (std::size_t u : candidates_[s]) {
      plan_[s] = u;
      if (consistent() && place(depth + 1)) return true;
    }
    assigned_[s] = false;
    return false;
  }

  const WspInstance& wsp_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<std::size_t> order_;
  Plan plan_;
  std::vector<bool> assigned_;
};

}  // namespace

bool has_valid_plan(const WspInstance& wsp, const ExtendedPlan& allowed) { return PlanSearch(wsp, allowed).run(); }

ResilienceReport check_tau_resilient(const WspInstance& wsp, const ExtendedPlan& plan, int tau) {
  if (tau < 0) throw DomainError("check_tau_resilient: tau must be non-negative");
  const std::size_t n = wsp.n();
  if (plan.size() != static_cast<std::size_t>(wsp.step_count())) throw DomainError("extended plan must list every step");
  if (static_cast<std::size_t>(tau) > n) throw DomainError("check_tau_resilient: tau exceeds the user count");
  ResilienceReport report;
  boost::multiprecision::cpp_int subsets = 1;
  for (int i = 0; i < tau; ++i) subsets = subsets * (n - static_cast<std::size_t>(i)) / (i + 1);
  if (subsets > kMaxResilienceSubsets) {
    throw GuardError("check_tau_resilient: C(" + std::to_string(n) + ", " + std::to_string(tau) + ") = " +
                     subsets.str() + " subsets exceeds the bound 10^6; use the encoding's zero-weight criterion");
  }

  std::vector<std::size_t> removed(static_cast<std::size_t>(tau));
  std::iota(removed.begin(), removed.end(), 0);
  while (true) {
    ++report.subsets_checked;
    ExtendedPlan rest(plan.size());
    for (std::size_t s = 0; s < plan.size(); ++s) {
      for (std::size_t u : plan[s]) {
        if (!std::binary_search(removed.begin(), removed.end(), u)) rest[s].push_back(u);
      }
    }
    if (!has_valid_plan(wsp, rest)) {
      report.resilient = false;
      report.witness = removed;
      return report;
    }
    // Next τ-combination in lexicographic order.
    int i = tau - 1;
    while (i >= 0 && removed[static_cast<std::size_t>(i)] == n - static_cast<std::size_t>(tau - i)) --i;
    if (i < 0) break;
    ++removed[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < tau; ++j) removed[static_cast<std::size_t>(j)] = removed[static_cast<std::size_t>(j - 1)] + 1;
  }
  return report;
}

}  // namespace vapep
