#include "vapep/matching.hpp"

#include <limits>

namespace vapep {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, Weight fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

namespace {

__extension__ typedef __int128 Wide;

constexpr Wide kInfinity = static_cast<Wide>(std::numeric_limits<std::int64_t>::max()) *
                           static_cast<Wide>(std::numeric_limits<std::int32_t>::max());

/// Rectangular Hungarian method over `row_ids` × `col_ids` (row count <= col
/// count). `cost(i, j)` receives positions into those lists. Returns the
/// column position chosen for each row position.
template <class CostFn>
std::vector<std::size_t> hungarian(std::size_t rows, std::size_t cols, CostFn cost) {
  std::vector<Wide> u(rows + 1, 0);
  std::vector<Wide> v(cols + 1, 0);
  std::vector<std::size_t> p(cols + 1, 0);  // p[j]: row (1-based) matched to column j
  std::vector<std::size_t> way(cols + 1, 0);
  std::vector<Wide> minv(cols + 1);
  std::vector<char> used(cols + 1);

  for (std::size_t i = 1; i <= rows; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInfinity);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      Wide delta = kInfinity;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const Wide cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> col_of_row(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
  }
  return col_of_row;
}

void require_feasible(const CostMatrix& costs) {
  if (costs.rows() > costs.cols()) {
    throw InfeasibleError("min_cost_assignment: " + std::to_string(costs.rows()) + " slots but only " +
                          std::to_string(costs.cols()) + " users");
  }
}

Weight sum_costs(const CostMatrix& costs, const std::vector<std::size_t>& col_of_row) {
  Weight total = 0;
  for (std::size_t i = 0; i < col_of_row.size(); ++i) total = checked_add(total, costs.at(i, col_of_row[i]));
  return total;
}

}  // namespace

Weight min_cost_value(const CostMatrix& costs) {
  require_feasible(costs);
  if (costs.rows() == 0) return 0;
  const auto cols =
      hungarian(costs.rows(), costs.cols(), [&](std::size_t i, std::size_t j) { return Wide{costs.at(i, j)}; });
  return sum_costs(costs, cols);
}

Assignment min_cost_assignment(const CostMatrix& costs) {
  require_feasible(costs);
  Assignment out;
  out.user_of_slot.assign(costs.rows(), 0);
  if (costs.rows() == 0) return out;

  // Fix slots one at a time. For slot i, the residual problem over slots
  // i.. and the still-free columns is solved with costs scaled by (n + 1)
  // plus the column index on row i only, so the optimum first minimises
  // cost and then the column given to slot i.
  const Wide scale = static_cast<Wide>(costs.cols()) + 1;
  std::vector<std::size_t> free_cols(costs.cols());
  for (std::size_t j = 0; j < costs.cols(); ++j) free_cols[j] = j;

  for (std::size_t slot = 0; slot < costs.rows(); ++slot) {
    const std::size_t rows_left = costs.rows() - slot;
    const auto pick = hungarian(rows_left, free_cols.size(), [&](std::size_t i, std::size_t j) {
      const std::size_t col = free_cols[j];
      Wide c = Wide{costs.at(slot + i, col)} * scale;
      if (i == 0) c += static_cast<Wide>(col);
      return c;
    });
    const std::size_t chosen = free_cols[pick[0]];
    out.user_of_slot[slot] = chosen;
    free_cols.erase(free_cols.begin() + static_cast<std::ptrdiff_t>(pick[0]));
  }
  out.total = sum_costs(costs, out.user_of_slot);
  return out;
}

}  // namespace vapep
