#include "vapep/types.hpp"

#include <algorithm>
#include <limits>

namespace vapep {

Weight checked_add(Weight a, Weight b) {
  Weight out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw OverflowError("weight overflow: sum exceeds 2^63-1");
  }
  return out;
}

Weight checked_mul(Weight a, Weight b) {
  Weight out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw OverflowError("weight overflow: product exceeds 2^63-1");
  }
  return out;
}

std::vector<ResourceSet> subsets_in_order(int k) {
  if (k < 0 || k > 24) {
    throw DomainError("subsets_in_order: k must lie in [0, 24], got " + std::to_string(k));
  }
  std::vector<ResourceSet> out(std::size_t{1} << k);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<ResourceSet>(i);
  }
  std::stable_sort(out.begin(), out.end(), subset_order_less);
  return out;
}

std::string format_set(ResourceSet s) {
  std::string out = "{";
  bool first = true;
  for (int r = 0; r < 32; ++r) {
    if (contains(s, r)) {
      if (!first) out += ',';
      out += 'r' + std::to_string(r);
      first = false;
    }
  }
  out += '}';
  return out;
}

}  // namespace vapep
