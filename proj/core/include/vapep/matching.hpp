#pragma once

#include <cstddef>
#include <vector>

#include "vapep/types.hpp"

namespace vapep {

/// Dense m × n slot-by-user cost table with m <= n.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols, Weight fill = 0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Weight& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Weight at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Weight> data_;
};

struct Assignment {
  std::vector<std::size_t> user_of_slot;  ///< injective slot -> column map
  Weight total = 0;
};

/// Minimum-cost injective assignment of every row to a distinct column
/// (rectangular Hungarian method, O(m^2 n)). Among optimal assignments the
/// one whose column sequence (slot 0, slot 1, ...) is lexicographically
/// smallest is returned. Throws InfeasibleError when m > n.
Assignment min_cost_assignment(const CostMatrix& costs);

/// Optimal value only; skips the tie-break passes.
Weight min_cost_value(const CostMatrix& costs);

}  // namespace vapep
