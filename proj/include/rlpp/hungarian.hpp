// Kuhn-Munkres assignment solver for square cost matrices, O(n^3).
#pragma once

#include <limits>
#include <vector>

namespace rlpp {

// Minimizes sum_i cost[i][assignment[i]] over permutations. Returns the
// optimal total cost; `assignment` maps rows to columns.
inline double solve_assignment(const std::vector<std::vector<double>>& cost,
                               std::vector<int>& assignment) {
  const int n = static_cast<int>(cost.size());
  assignment.assign(n, -1);
  if (n == 0) return 0.0;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
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
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) {
      assignment[p[j] - 1] = j - 1;
      total += cost[p[j] - 1][j - 1];
    }
  }
  return total;
}

}  // namespace rlpp
