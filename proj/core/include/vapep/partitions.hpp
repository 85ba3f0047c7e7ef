#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "vapep/types.hpp"

namespace vapep {

/// Bell(K), exact for K <= 25.
std::uint64_t bell_number(int size);

/// A set partition of {0..K-1} as a restricted-growth string: rgs[0] = 0 and
/// rgs[i] <= 1 + max(rgs[0..i-1]). `blocks[b]` holds the members of block b.
struct Partition {
  std::vector<int> rgs;
  std::vector<ResourceSet> blocks;
};

/// Every partition of {0..size-1}, in lexicographic order of the
/// restricted-growth string. Returning false from `visit` stops early.
void for_each_partition(int size, const std::function<bool(const Partition&)>& visit);

}  // namespace vapep
