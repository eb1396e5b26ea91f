#pragma once

// Exact transportation simplex (the network simplex specialised to the
// bipartite transport polytope). Northwest-corner start, u-v potentials on the
// basis tree, Bland's rule for entering and leaving cells.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "mkdiv/error.hpp"

namespace mkdiv {

struct PlanEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

struct TransportResult {
  std::vector<PlanEntry> plan;  ///< cells with positive mass, row-major order
  double cost = 0.0;
  std::size_t pivots = 0;
};

/// Minimise sum_ij cost(i,j) x_ij subject to row sums `supply` and column sums
/// `demand` (equal totals). `cost` is row-major m x n.
inline TransportResult solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                                       const std::vector<double>& cost) {
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  if (m == 0 || n == 0) throw DomainError("transport: empty marginal");
  if (cost.size() != m * n) throw DomainError("transport: cost matrix has wrong size");

  std::vector<double> x(m * n, 0.0);
  std::vector<char> basic(m * n, 0);
  auto cell = [n](std::size_t i, std::size_t j) { return i * n + j; };

  // Northwest corner; ties advance the row first so the basis stays a
  // spanning tree with exactly m + n - 1 cells.
  {
    std::vector<double> a = supply, b = demand;
    std::size_t i = 0, j = 0;
    while (true) {
      const double q = std::min(a[i], b[j]);
      x[cell(i, j)] = q;
      basic[cell(i, j)] = 1;
      a[i] -= q;
      b[j] -= q;
      if (i == m - 1 && j == n - 1) break;
      if (j == n - 1 || (i < m - 1 && a[i] <= b[j])) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  double scale = 1.0;
  for (double c : cost) scale = std::max(scale, std::abs(c));
  const double tol = 1e-12 * scale;

  const std::size_t nodes = m + n;  // rows 0..m-1, columns m..m+n-1
  std::vector<double> pot(nodes);
  std::vector<std::size_t> parent(nodes), parent_cell(nodes);
  std::vector<char> visited(nodes);
  std::vector<std::vector<std::size_t>> adj(nodes);  // basic cells incident to each node

  TransportResult res;
  const std::size_t max_pivots = 200000;
  for (;;) {
    for (auto& a : adj) a.clear();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (basic[cell(i, j)]) {
          adj[i].push_back(cell(i, j));
          adj[m + j].push_back(cell(i, j));
        }
      }
    }
    // Potentials u_i + v_j = c_ij on the tree, rooted at row 0.
    std::fill(visited.begin(), visited.end(), 0);
    std::deque<std::size_t> queue{0};
    visited[0] = 1;
    pot[0] = 0.0;
    parent[0] = nodes;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t c : adj[v]) {
        const std::size_t r = c / n, col = m + c % n;
        const std::size_t w = v == r ? col : r;
        if (visited[w]) continue;
        visited[w] = 1;
        pot[w] = cost[c] - pot[v];
        parent[w] = v;
        parent_cell[w] = c;
        queue.push_back(w);
      }
    }
    for (std::size_t v = 0; v < nodes; ++v) {
      if (!visited[v]) throw Error("transport: basis is not a spanning tree");
    }

    std::size_t entering = m * n;
    for (std::size_t i = 0; i < m && entering == m * n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!basic[cell(i, j)] && cost[cell(i, j)] - pot[i] - pot[m + j] < -tol) {
          entering = cell(i, j);
          break;
        }
      }
    }
    if (entering == m * n) break;
    if (++res.pivots > max_pivots) throw Error("transport: pivot limit exceeded");

    // Tree path from column node back to the root and from the row node back
    // to the root; the cycle is their symmetric difference plus the entering cell.
    const std::size_t er = entering / n, ec = m + entering % n;
    auto root_path = [&](std::size_t v) {
      std::vector<std::size_t> path{v};
      while (parent[path.back()] != nodes) path.push_back(parent[path.back()]);
      return path;
    };
    const auto pc = root_path(ec);
    const auto pr = root_path(er);
    std::size_t lca_c = pc.size() - 1, lca_r = pr.size() - 1;
    while (lca_c > 0 && lca_r > 0 && pc[lca_c - 1] == pr[lca_r - 1]) {
      --lca_c;
      --lca_r;
    }
    // Cycle order: entering (+), then edges from ec up to the LCA, then down to er.
    std::vector<std::size_t> cycle;
    for (std::size_t k = 0; k < lca_c; ++k) cycle.push_back(parent_cell[pc[k]]);
    std::vector<std::size_t> down;
    for (std::size_t k = 0; k < lca_r; ++k) down.push_back(parent_cell[pr[k]]);
    cycle.insert(cycle.end(), down.rbegin(), down.rend());

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = m * n;
    for (std::size_t k = 0; k < cycle.size(); k += 2) {  // minus cells
      const std::size_t c = cycle[k];
      if (x[c] < theta || (x[c] == theta && c < leaving)) {
        theta = x[c];
        leaving = c;
      }
    }
    x[entering] = theta;
    basic[entering] = 1;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      const std::size_t c = cycle[k];
      if (k % 2 == 0) {
        x[c] = c == leaving ? 0.0 : x[c] - theta;
      } else {
        x[c] += theta;
      }
    }
    basic[leaving] = 0;
    x[leaving] = 0.0;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double q = x[cell(i, j)];
      if (q > 0.0) {
        res.plan.push_back({i, j, q});
        total += q * cost[cell(i, j)];
      }
    }
  }
  res.cost = total;
  return res;
}

}  // namespace mkdiv
