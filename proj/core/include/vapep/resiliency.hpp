#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vapep/model.hpp"
#include "vapep/wsp.hpp"

namespace vapep {

/// Π : S -> 2^U, one user-index list per step.
using ExtendedPlan = std::vector<std::vector<std::size_t>>;

struct ResilienceEncoding {
  Weight p_sod = 10;
  Weight p_card = 10;
  Weight p_auth = 1;
  /// Coefficient of the |A(R)|^2 term.
  Weight user_count_coef = 1;
};

/// Valued APEP whose zero-weight solutions are τ-resilient extended plans:
/// one SoD_U per must_differ constraint, CardLB(r, τ+1) on every step, one
/// quadratic user count, and p_auth per unauthorized pair. The WSP must use
/// one authorization group per step and only must_differ constraints.
Instance encode_resilient(const WspInstance& wsp, int tau, const ResilienceEncoding& enc = {});

/// Π(s) = A(s).
ExtendedPlan plan_from_relation(const AuthorizationRelation& a, int step_count);

struct ResilienceReport {
  bool resilient = true;
  /// First τ-subset of users (lexicographic) with no surviving valid plan.
  std::optional<std::vector<std::size_t>> witness;
  std::size_t subsets_checked = 0;
};

inline constexpr std::size_t kMaxResilienceSubsets = 1'000'000;

/// For every τ-subset T of users, looks for a plan with π(s) ∈ Π(s) \ T that
/// is authorized and satisfies every constraint. Throws GuardError when
/// C(n, τ) exceeds kMaxResilienceSubsets.
ResilienceReport check_tau_resilient(const WspInstance& wsp, const ExtendedPlan& plan, int tau);

/// Whether some valid plan uses only users in `allowed` for step s.
bool has_valid_plan(const WspInstance& wsp, const ExtendedPlan& allowed);

}  // namespace vapep
