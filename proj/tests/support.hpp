#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "mkdiv/numeric.hpp"
#include "mkdiv/scores.hpp"

namespace mkdiv::testing {

/// Minimum over all n! permutations of (1/n) sum S(a2[p[i]], a1[i]).
inline double brute_force_optimum(const Score& s, std::span<const double> a1, std::span<const double> a2) {
  std::vector<std::size_t> p(a1.size());
  std::iota(p.begin(), p.end(), 0);
  double best = kInf;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) total += s(a2[p[i]], a1[i]);
    best = std::min(best, total / static_cast<double>(p.size()));
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace mkdiv::testing
