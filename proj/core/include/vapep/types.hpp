#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vapep {

/// Non-negative weight. Arithmetic goes through checked_add / checked_mul;
/// results at or above 2^63 raise OverflowError rather than saturating.
using Weight = std::int64_t;

/// Bit i set iff resource (or step) i is a member.
using ResourceSet = std::uint32_t;

inline constexpr int kMaxResources = 30;

/// Invalid identifiers, malformed scopes, out-of-range arguments.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A search-space guard refused to run; the message carries the bound.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Weight checked_add(Weight a, Weight b);
Weight checked_mul(Weight a, Weight b);

inline int popcount(ResourceSet s) { return std::popcount(s); }

inline bool contains(ResourceSet s, int r) { return (s >> r) & 1u; }

inline ResourceSet full_set(int k) {
  return k >= 32 ? ~ResourceSet{0} : ((ResourceSet{1} << k) - 1u);
}

/// Total order used wherever iteration order over subsets must be
/// reproducible: by cardinality first, then by numeric value.
inline bool subset_order_less(ResourceSet a, ResourceSet b) {
  const int pa = popcount(a);
  const int pb = popcount(b);
  return pa != pb ? pa < pb : a < b;
}

/// All subsets of a k-element ground set in subset_order_less order; the
/// empty set comes first.
std::vector<ResourceSet> subsets_in_order(int k);

/// Renders {r0,r2} style text for diagnostics.
std::string format_set(ResourceSet s);

}  // namespace vapep
