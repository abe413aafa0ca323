#include "deteval/assignment.h"

#include <algorithm>
#include <limits>

namespace deteval {

std::vector<std::size_t> solve_max_weight_assignment(const WeightMatrix& weights) {
  const std::size_t n = weights.size();
  if (n == 0) return {};

  // Minimise cost = -weight. Rows and columns are 1-based below; index 0 is
  // the virtual source used by the augmenting search.
  using Real = long double;
  constexpr Real kInf = std::numeric_limits<Real>::infinity();
  constexpr std::size_t kNone = 0;

  std::vector<Real> row_pot(n + 1, 0.0L);
  std::vector<Real> col_pot(n + 1, 0.0L);
  std::vector<std::size_t> col_owner(n + 1, kNone);  // row matched to column
  std::vector<std::size_t> way(n + 1, 0);
  std::vector<Real> min_slack(n + 1);
  std::vector<char> used(n + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    col_owner[0] = row;
    std::size_t col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t r0 = col_owner[col0];
      const std::span<const double> costs = weights.row(r0 - 1);
      Real delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const Real reduced = -static_cast<Real>(costs[c - 1]) - row_pot[r0] - col_pot[c];
        if (reduced < min_slack[c]) {
          min_slack[c] = reduced;
          way[c] = col0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          row_pot[col_owner[c]] += delta;
          col_pot[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col0 = col1;
    } while (col_owner[col0] != kNone);
    do {
      const std::size_t col1 = way[col0];
      col_owner[col0] = col_owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<std::size_t> row_to_col(n);
  for (std::size_t c = 1; c <= n; ++c) row_to_col[col_owner[c] - 1] = c - 1;
  return row_to_col;
}

long double assignment_weight(const WeightMatrix& weights,
                              std::span<const std::size_t> row_to_col) {
  long double total = 0.0L;
  for (std::size_t r = 0; r < row_to_col.size(); ++r) total += weights(r, row_to_col[r]);
  return total;
}

}  // namespace deteval
