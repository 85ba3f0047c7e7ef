#include "vapep/partitions.hpp"

namespace vapep {

std::uint64_t bell_number(int size) {
  if (size < 0 || size > 25) throw DomainError("bell_number: size outside [0, 25]");
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 0; i < size; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

namespace {

bool extend(int pos, int size, Partition& p, const std::function<bool(const Partition&)>& visit) {
  if (pos == size) return visit(p);
  const int open = static_cast<int>(p.blocks.size());
  for (int b = 0; b <= open; ++b) {
    if (b == open) p.blocks.push_back(0);
    p.rgs[static_cast<std::size_t>(pos)] = b;
    p.blocks[static_cast<std::size_t>(b)] |= ResourceSet{1} << pos;
    const bool go_on = extend(pos + 1, size, p, visit);
    p.blocks[static_cast<std::size_t>(b)] &= ~(ResourceSet{1} << pos);
    if (b == open) p.blocks.pop_back();
    if (!go_on) return false;
  }
  return true;
}

}  // namespace

void for_each_partition(int size, const std::function<bool(const Partition&)>& visit) {
  if (size < 0 || size > 31) throw DomainError("for_each_partition: size outside [0, 31]");
  Partition p;
  p.rgs.assign(static_cast<std::size_t>(size), 0);
  extend(0, size, p, visit);
}

}  // namespace vapep
