#pragma once

// Randomised certification of the closed-form coupling against the exact
// discrete oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mkdiv/distributions.hpp"
#include "mkdiv/rng.hpp"
#include "mkdiv/scores.hpp"
#include "mkdiv/transport.hpp"

namespace mkdiv {

/// Atom range used for random instances: [-3, 3] when the score accepts
/// negative arguments, (0.1, 3] otherwise.
inline std::pair<double, double> instance_range(const Score& s) {
  return s.in_domain(-1.0, -1.0) && s.in_domain(-3.0, 3.0) && s.in_domain(3.0, -3.0) ? std::pair{-3.0, 3.0}
                                                                                     : std::pair{0.1, 3.0};
}

struct CertificationReport {
  std::size_t instances = 0;
  double max_deviation = 0.0;          ///< max |closed form - oracle| / (1 + oracle)
  double max_sorted_deviation = 0.0;   ///< same for the rank (or reversed rank) matching
  double tolerance = 1e-9;
  bool passed() const { return max_deviation <= tolerance && max_sorted_deviation <= tolerance; }
};

/// Rank matching implied by the claim: i-th smallest of atoms1 to i-th
/// smallest (comonotonic) or i-th largest (antitonic) of atoms2.
inline std::vector<std::size_t> claimed_matching(Coupling c, std::span<const double> atoms1,
                                                 std::span<const double> atoms2) {
  const std::size_t n = atoms1.size();
  std::vector<std::size_t> r1(n), r2(n);
  std::iota(r1.begin(), r1.end(), 0);
  std::iota(r2.begin(), r2.end(), 0);
  std::stable_sort(r1.begin(), r1.end(), [&](auto a, auto b) { return atoms1[a] < atoms1[b]; });
  std::stable_sort(r2.begin(), r2.end(), [&](auto a, auto b) { return atoms2[a] < atoms2[b]; });
  if (c == Coupling::antitonic) std::reverse(r2.begin(), r2.end());
  std::vector<std::size_t> match(n);
  for (std::size_t k = 0; k < n; ++k) match[r1[k]] = r2[k];
  return match;
}

/// `instances` random equal-weight problems with n drawn from {2..max_n}.
/// With `unequal_sizes`, the second side gets its own size and the LP oracle
/// is used instead of the assignment solver.
inline CertificationReport certify_coupling(const Score& s, std::size_t max_n, std::size_t instances,
                                            std::uint64_t seed, bool unequal_sizes = false,
                                            double tolerance = 1e-9) {
  CertificationReport rep;
  rep.tolerance = tolerance;
  Rng rng(seed);
  const auto [lo, hi] = instance_range(s);
  for (std::size_t k = 0; k < instances; ++k) {
    const std::size_t n1 = rng.index(2, max_n);
    const std::size_t n2 = unequal_sizes ? rng.index(2, max_n) : n1;
    std::vector<double> a1(n1), a2(n2);
    for (auto& x : a1) x = rng.uniform(lo, hi);
    for (auto& x : a2) x = rng.uniform(lo, hi);
    const double closed = mk_divergence(s, from_samples(a1), from_samples(a2));
    CouplingReport oracle;
    if (unequal_sizes) {
      const std::vector<double> w1(n1, 1.0 / static_cast<double>(n1)), w2(n2, 1.0 / static_cast<double>(n2));
      oracle = oracle_optimal(s, a1, a2, std::span<const double>(w1), std::span<const double>(w2));
    } else {
      oracle = oracle_optimal(s, a1, a2);
      const double sorted = coupling_value(s, a1, a2, claimed_matching(s.coupling(), a1, a2));
      rep.max_sorted_deviation =
          std::max(rep.max_sorted_deviation, std::abs(sorted - oracle.value) / (1.0 + oracle.value));
    }
    rep.max_deviation = std::max(rep.max_deviation, std::abs(closed - oracle.value) / (1.0 + oracle.value));
    ++rep.instances;
  }
  return rep;
}

}  // namespace mkdiv
