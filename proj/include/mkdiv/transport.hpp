#pragma once

// MK divergences between distributions on the real line: the closed form via
// the comonotonic/antitonic quantile coupling, and an exact discrete oracle
// (assignment for equal weights, transportation simplex otherwise).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mkdiv/assignment.hpp"
#include "mkdiv/distributions.hpp"
#include "mkdiv/error.hpp"
#include "mkdiv/network_simplex.hpp"
#include "mkdiv/numeric.hpp"
#include "mkdiv/scores.hpp"

namespace mkdiv {

struct GridOptions {
  std::size_t grid_size = kDefaultGridSize;
  double delta = kDefaultDelta;
  unsigned threads = 1;
};

enum class OracleMethod { assignment, lp, closed_form };

inline std::string to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::assignment: return "assignment";
    case OracleMethod::lp: return "lp";
    case OracleMethod::closed_form: return "closed_form";
  }
  return "?";
}

struct CouplingReport {
  double value = 0.0;
  /// matching[i] = index into atoms2 paired with atoms1[i] (equal-weight case).
  std::vector<std::size_t> matching;
  std::vector<PlanEntry> plan;
  OracleMethod method = OracleMethod::assignment;
};

inline constexpr std::size_t kOracleCapacity = 64;

namespace detail {

inline double cost_or_throw(const Score& s, double z1, double z2, double u) {
  if (!s.in_domain(z2, z1)) {
    throw DomainError("mk_divergence: score " + s.family_name() + " undefined at (z1, z2) = (" +
                      format_number(z1) + ", " + format_number(z2) + "), u = " + format_number(u));
  }
  return s(z2, z1);
}

}  // namespace detail

/// Transport cost of the closed-form coupling claimed by `s`: pairs the
/// i-th smallest of q1 with the i-th smallest (comonotonic) or i-th largest
/// (antitonic) of q2. Both inputs are sorted ascending and of equal length.
inline double closed_form_value(const Score& s, std::span<const double> q1, std::span<const double> q2,
                                unsigned threads = 1) {
  const std::size_t n = q1.size();
  const bool anti = s.coupling() == Coupling::antitonic;
  const auto terms = parallel_map(n, threads, [&](std::size_t i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    return detail::cost_or_throw(s, q1[i], anti ? q2[n - 1 - i] : q2[i], u);
  });
  return mean_of(terms);
}

/// Exact quantile coupling of two equal-weight samples of different sizes:
/// (0,1) is cut at every k/m and l/n and each piece pairs one atom from each side.
inline double closed_form_value_merged(const Score& s, std::span<const double> q1, std::span<const double> q2) {
  const std::size_t m = q1.size(), n = q2.size();
  const bool anti = s.coupling() == Coupling::antitonic;
  std::vector<double> terms;
  terms.reserve(m + n);
  // Positions on (0,1) are tracked as integers over the common denominator m*n.
  std::size_t k = 0, l = 0, pos = 0;
  while (k < m && l < n) {
    const std::size_t end1 = (k + 1) * n, end2 = (l + 1) * m;
    const std::size_t end = std::min(end1, end2);
    const double u = (static_cast<double>(pos + end) * 0.5) / static_cast<double>(m * n);
    const double z2 = anti ? q2[n - 1 - l] : q2[l];
    terms.push_back(detail::cost_or_throw(s, q1[k], z2, u) * static_cast<double>(end - pos));
    pos = end;
    if (end1 == end) ++k;
    if (end2 == end) ++l;
  }
  return pairwise_sum(terms) / static_cast<double>(m * n);
}

/// MK divergence from F1 to F2 with cost c(z1, z2) = S(z2, z1), evaluated on
/// the coupling the score's family makes optimal. Two empirical inputs are
/// paired exactly; anything else uses the midpoint quantile grid.
inline double mk_divergence(const Score& s, const Distribution& f1, const Distribution& f2,
                            const GridOptions& opt = {}) {
  if (f1.is_empirical() && f2.is_empirical()) {
    if (f1.atoms().size() == f2.atoms().size()) return closed_form_value(s, f1.atoms(), f2.atoms(), opt.threads);
    return closed_form_value_merged(s, f1.atoms(), f2.atoms());
  }
  const auto g1 = quantile_grid(f1, opt.grid_size, opt.delta);
  const auto g2 = quantile_grid(f2, opt.grid_size, opt.delta);
  return closed_form_value(s, g1.nodes, g2.nodes, opt.threads);
}

inline double wasserstein_p(const Distribution& f1, const Distribution& f2, double p, const GridOptions& opt = {}) {
  if (!(p >= 1.0)) throw DomainError("wasserstein_p: requires p >= 1");
  std::vector<double> q1, q2;
  if (f1.is_empirical() && f2.is_empirical() && f1.atoms().size() == f2.atoms().size()) {
    q1 = f1.atoms();
    q2 = f2.atoms();
  } else {
    q1 = quantile_grid(f1, opt.grid_size, opt.delta).nodes;
    q2 = quantile_grid(f2, opt.grid_size, opt.delta).nodes;
  }
  const auto terms = parallel_map(q1.size(), opt.threads, [&](std::size_t i) {
    const double d = std::abs(q1[i] - q2[i]);
    return p == 2.0 ? d * d : std::pow(d, p);
  });
  const double m = mean_of(terms);
  return p == 2.0 ? std::sqrt(m) : std::pow(m, 1.0 / p);
}

/// (1/n) sum_i S(atoms2[matching[i]], atoms1[i]).
inline double coupling_value(const Score& s, std::span<const double> atoms1, std::span<const double> atoms2,
                             std::span<const std::size_t> matching) {
  const std::size_t n = atoms1.size();
  if (atoms2.size() != n || matching.size() != n) throw DomainError("coupling_value: length mismatch");
  std::vector<char> hit(n, 0);
  for (std::size_t j : matching) {
    if (j >= n || hit[j]) throw DomainError("coupling_value: matching is not a permutation");
    hit[j] = 1;
  }
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = s(atoms2[matching[i]], atoms1[i]);
  return mean_of(terms);
}

/// Exact optimum of the discrete MK problem. Without weights both sides carry
/// mass 1/n and the problem is a linear assignment; with weights it is solved
/// on the transport polytope.
inline CouplingReport oracle_optimal(const Score& s, std::span<const double> atoms1, std::span<const double> atoms2,
                                     std::optional<std::span<const double>> weights1 = std::nullopt,
                                     std::optional<std::span<const double>> weights2 = std::nullopt) {
  CouplingReport rep;
  if (!weights1 && !weights2) {
    const std::size_t n = atoms1.size();
    if (atoms2.size() != n) throw DomainError("oracle_optimal: equal-weight path needs equal atom counts");
    if (n == 0) throw DomainError("oracle_optimal: no atoms");
    if (n > kOracleCapacity) {
      throw CapacityError("oracle_optimal: n = " + std::to_string(n) + " exceeds " + std::to_string(kOracleCapacity));
    }
    CostMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) c(i, j) = s(atoms2[j], atoms1[i]);
    }
    const auto a = solve_assignment(c);
    rep.method = OracleMethod::assignment;
    rep.matching = a.row_to_col;
    rep.value = coupling_value(s, atoms1, atoms2, rep.matching);
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) rep.plan.push_back({i, rep.matching[i], w});
    return rep;
  }

  const std::size_t m = atoms1.size(), n = atoms2.size();
  if (m == 0 || n == 0) throw DomainError("oracle_optimal: no atoms");
  if (m + n > kOracleCapacity) {
    throw CapacityError("oracle_optimal: " + std::to_string(m + n) + " support points exceed " +
                        std::to_string(kOracleCapacity));
  }
  auto weights_or_uniform = [](std::optional<std::span<const double>> w, std::size_t k, const char* side) {
    std::vector<double> out;
    if (w) {
      if (w->size() != k) throw DomainError(std::string("oracle_optimal: weight count mismatch on ") + side);
      out.assign(w->begin(), w->end());
    } else {
      out.assign(k, 1.0 / static_cast<double>(k));
    }
    double total = 0.0;
    for (double x : out) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError(std::string("oracle_optimal: negative weight on ") + side);
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError(std::string("oracle_optimal: weights must sum to 1 on ") + side);
    return out;
  };
  const auto w1 = weights_or_uniform(weights1, m, "side 1");
  auto w2 = weights_or_uniform(weights2, n, "side 2");
  // Absorb rounding so both marginals carry the same total mass.
  double t1 = 0.0, t2 = 0.0;
  for (double x : w1) t1 += x;
  for (double x : w2) t2 += x;
  w2.back() += t1 - t2;
  if (w2.back() < 0.0) w2.back() = 0.0;

  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = s(atoms2[j], atoms1[i]);
  }
  const auto t = solve_transport(w1, w2, cost);
  rep.method = OracleMethod::lp;
  rep.plan = t.plan;
  std::vector<double> terms;
  for (const auto& e : t.plan) terms.push_back(e.mass * cost[e.i * n + e.j]);
  rep.value = pairwise_sum(terms);
  return rep;
}

}  // namespace mkdiv
