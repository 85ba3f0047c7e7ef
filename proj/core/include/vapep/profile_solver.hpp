#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "vapep/model.hpp"

namespace vapep {

using BigInt = boost::multiprecision::cpp_int;

/// C(ℓ + 2^k − 1, ℓ): the number of profiles with at most ℓ assigned users.
BigInt count_profiles(int k, std::size_t ell);

/// Visits every profile with Σ_{T≠∅} usr(T) <= ℓ and usr(∅) = n − Σ_{T≠∅}
/// usr(T). Branches on usr(T_1), usr(T_2), ... over the non-empty subsets in
/// (popcount, value) order, each from 0 upward, so profiles arrive in
/// lexicographic order of that count vector. With `require_complete`,
/// branches that can no longer cover every resource are cut.
void enumerate_profiles(int k, std::size_t ell, std::size_t n, bool require_complete,
                        const std::function<void(const UserProfile&)>& visit);

struct ProfileCompletion {
  AuthorizationRelation relation;
  Weight authorizations = 0;
  Weight constraints = 0;
  Weight total = 0;
};

/// Cheapest relation whose profile is exactly `usr` (Hungarian matching of
/// subset copies to users with cost ω(u, T)).
ProfileCompletion best_relation_for_profile(const Instance& inst, const UserProfile& usr);

/// max_profiles value that switches the size guard off.
inline constexpr std::uint64_t kUnlimitedProfiles = UINT64_MAX;

struct ProfileSolveOptions {
  /// ℓ; defaults to wbound_suggestion. Explicit values above n are clamped.
  std::optional<std::size_t> user_cap;
  unsigned threads = 1;
  /// Cut subtrees whose partial lower bound already reaches the incumbent.
  /// Only the built-in families contribute bounds. Does not change results.
  bool node_bounds = true;
  /// Refuse when count_profiles(k, ℓ) exceeds this. Pruning often keeps far
  /// larger spaces tractable; kUnlimitedProfiles skips the check.
  std::uint64_t max_profiles = 100'000'000'000ULL;
};

/// Exact minimum over complete relations with at most ℓ active users. Ties
/// go to the lexicographically smallest profile, then to the matching
/// tie-break, independent of the thread count.
SolveResult solve_profile(const Instance& inst, const ProfileSolveOptions& options = {});

/// The ℓ solve_profile uses for `options`.
std::size_t effective_user_cap(const Instance& inst, const ProfileSolveOptions& options);

}  // namespace vapep
