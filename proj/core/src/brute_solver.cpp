#include "vapep/brute_solver.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace vapep {

namespace {

struct Key {
  Weight total = std::numeric_limits<Weight>::max();
  std::vector<std::size_t> counts;  // per non-empty subset, in subset order
  std::vector<std::size_t> slots;   // users grouped by subset, ascending within a group

  bool operator<(const Key& o) const {
    if (total != o.total) return total < o.total;
    if (counts != o.counts) return counts < o.counts;
    return slots < o.slots;
  }
};

}  // namespace

SolveResult solve_exhaustive(const Instance& inst) {
  const auto started = std::chrono::steady_clock::now();
  const int k = inst.k();
  const std::size_t n = inst.n();
  if (static_cast<long long>(k) * static_cast<long long>(n) > kMaxBruteBits) {
    throw GuardError("exhaustive solver: (2^" + std::to_string(k) + ")^" + std::to_string(n) +
                     " relations exceeds the bound 2^24");
  }

  const auto order = subsets_in_order(k);
  std::vector<std::size_t> rank(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  const ResourceSet all = full_set(k);
  std::vector<std::size_t> digit(n, 0);
  AuthorizationRelation a(n);
  std::vector<ResourceSet> per_user(n, 0);
  Key best;
  AuthorizationRelation best_relation;
  std::uint64_t visited = 0;

  while (true) {
    for (std::size_t u = 0; u < n; ++u) per_user[u] = order[digit[u]];
    ResourceSet covered = 0;
    for (ResourceSet s : per_user) covered |= s;
    ++visited;
    if (covered == all) {
      a = AuthorizationRelation(per_user);
      Key key;
      key.total = big_omega(inst, a);
      for (const auto& c : inst.constraints()) key.total = checked_add(key.total, eval_relation(c, a, k));
      if (key.total <= best.total) {
        key.counts.assign(order.size() - 1, 0);
        for (ResourceSet s : per_user) {
          if (s != 0) ++key.counts[rank[s] - 1];
        }
        for (std::size_t i = 1; i < order.size(); ++i) {
          for (std::size_t u = 0; u < n; ++u) {
            if (per_user[u] == order[i]) key.slots.push_back(u);
          }
        }
        if (key < best) {
          best = std::move(key);
          best_relation = a;
        }
      }
    }
    // Odometer: the first user is the most significant digit, so the
    // sequence walks users outer and subsets inner.
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++digit[pos] < order.size()) break;
      digit[pos] = 0;
      if (pos == 0) {
        pos = n + 1;
        break;
      }
    }
    if (pos == n + 1 || n == 0) break;
  }

  SolveMeta meta;
  meta.solver = "brute";
  meta.user_cap = n;
  meta.profiles_enumerated = visited;
  meta.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return SolveResult(inst, std::move(best_relation), std::move(meta));
}

}  // namespace vapep
