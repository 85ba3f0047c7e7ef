#pragma once

#include "vapep/model.hpp"

namespace vapep {

/// Largest k·n the exhaustive solver accepts, i.e. (2^k)^n <= 2^24.
inline constexpr int kMaxBruteBits = 24;

/// Minimum-weight complete relation by trying every u ↦ A(u).
///
/// Ties are broken exactly as solve_profile does with ℓ = n: smallest
/// profile count vector first, then the smallest slot -> user sequence.
/// Throws GuardError when k·n exceeds kMaxBruteBits.
SolveResult solve_exhaustive(const Instance& inst);

}  // namespace vapep
