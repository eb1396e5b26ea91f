#pragma once

// Exact linear assignment (Hungarian method with potentials, O(n^3)) plus a
// post-pass that picks the lexicographically smallest optimal permutation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "mkdiv/error.hpp"

namespace mkdiv {

/// Row-major square cost matrix.
struct CostMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  CostMatrix() = default;
  explicit CostMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

struct AssignmentResult {
  std::vector<std::size_t> row_to_col;
  double cost = 0.0;
};

namespace detail {

struct HungarianState {
  std::vector<double> u, v;            // 1-based potentials
  std::vector<std::size_t> col_owner;  // col_owner[j] = row matched to column j (1-based, 0 = free)
};

inline HungarianState hungarian(const CostMatrix& c) {
  const std::size_t n = c.n;
  const double inf = std::numeric_limits<double>::infinity();
  HungarianState st{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0),
                    std::vector<std::size_t>(n + 1, 0)};
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    st.col_owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = st.col_owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - st.u[i0] - st.v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          st.u[st.col_owner[j]] += delta;
          st.v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (st.col_owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      st.col_owner[j0] = st.col_owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  return st;
}

}  // namespace detail

/// Minimum-cost perfect matching. Among optimal permutations (edges tight
/// under the optimal dual, up to a relative tolerance) the lexicographically
/// smallest row_to_col is returned.
inline AssignmentResult solve_assignment(const CostMatrix& c) {
  const std::size_t n = c.n;
  AssignmentResult res;
  if (n == 0) return res;
  for (double x : c.data) {
    if (!std::isfinite(x)) throw DomainError("assignment: non-finite cost entry");
  }
  const auto st = detail::hungarian(c);

  double scale = 1.0;
  for (double x : c.data) scale = std::max(scale, std::abs(x));
  const double tight_tol = 1e-12 * scale;
  auto tight = [&](std::size_t i, std::size_t j) {
    return c(i, j) - st.u[i + 1] - st.v[j + 1] <= tight_tol;
  };

  // Start from the Hungarian matching, then fix rows in order to the smallest
  // column that still admits a perfect matching on tight edges.
  std::vector<std::size_t> row_to_col(n), col_to_row(n);
  for (std::size_t j = 1; j <= n; ++j) {
    row_to_col[st.col_owner[j] - 1] = j - 1;
    col_to_row[j - 1] = st.col_owner[j] - 1;
  }

  // Augmenting path from free row r to free column target over rows > fixed.
  std::vector<char> seen(n);
  std::function<bool(std::size_t, std::size_t, std::size_t)> augment;
  augment = [&](std::size_t r, std::size_t target, std::size_t fixed) -> bool {
    for (std::size_t j = 0; j < n; ++j) {
      if (seen[j] || !tight(r, j)) continue;
      const std::size_t owner = col_to_row[j];
      if (j != target && owner <= fixed) continue;
      seen[j] = 1;
      if (j == target || augment(owner, target, fixed)) {
        row_to_col[r] = j;
        col_to_row[j] = r;
        return true;
      }
    }
    return false;
  };

  std::vector<char> col_fixed(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (col_fixed[j] || !tight(i, j)) continue;
      if (row_to_col[i] == j) break;
      const auto saved_r2c = row_to_col;
      const auto saved_c2r = col_to_row;
      const std::size_t displaced = col_to_row[j];  // a row > i
      const std::size_t freed = row_to_col[i];
      row_to_col[i] = j;
      col_to_row[j] = i;
      std::fill(seen.begin(), seen.end(), 0);
      seen[j] = 1;
      if (augment(displaced, freed, i)) break;
      row_to_col = saved_r2c;
      col_to_row = saved_c2r;
    }
    col_fixed[row_to_col[i]] = 1;
  }

  res.row_to_col = row_to_col;
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = c(i, row_to_col[i]);
  double s = 0.0;
  for (double t : terms) s += t;
  res.cost = s;
  return res;
}

}  // namespace mkdiv
