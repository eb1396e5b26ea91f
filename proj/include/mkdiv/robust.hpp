#pragma once

// Worst-case distortion risk measures over Bregman-Wasserstein balls.
//
// For a reference quantile function F^-1, weight gamma and generator phi, the
// maximiser over the ball {G : B_phi(G, F) <= eps} has quantile function
//
//   G_lambda(u) = (phi')^-1( phi'(F^-1(u)) + gamma(u) / lambda ),
//
// with lambda > 0 chosen so that the constraint binds. The divergence of
// G_lambda decreases strictly in lambda, which makes a log-space bisection on
// lambda well posed. The same engine serves signed (negative, increasing)
// weights, which is how the cheapest-payoff problem reuses it.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mkdiv/distributions.hpp"
#include "mkdiv/error.hpp"
#include "mkdiv/generators.hpp"
#include "mkdiv/numeric.hpp"
#include "mkdiv/transport.hpp"

namespace mkdiv {

struct ChoquetResult {
  double value = 0.0;
  bool truncation_warning = false;  ///< some weight was non-finite and its node was dropped
};

/// H_g(G) = integral of gamma(u) G^-1(u) du on the grid's midpoints.
inline ChoquetResult choquet(const Distortion& d, const QuantileGrid& grid) {
  ChoquetResult r;
  std::vector<double> terms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = d.weight(grid.u(i));
    if (!std::isfinite(w)) {
      r.truncation_warning = true;
      terms[i] = 0.0;
      continue;
    }
    terms[i] = w * grid.nodes[i];
  }
  r.value = mean_of(terms);
  return r;
}

inline std::vector<double> distortion_weights(const Distortion& d, std::size_t m) {
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = d.weight((static_cast<double>(i) + 0.5) / static_cast<double>(m));
  return w;
}

/// Nodewise (phi')^-1(phi'(ref_i) + weight_i / lambda).
inline std::vector<double> perturbed_quantile(const ConvexGenerator& gen, std::span<const double> ref_nodes,
                                              std::span<const double> weights, double lambda,
                                              unsigned threads = 1) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  if (ref_nodes.size() != weights.size()) throw DomainError("perturbed_quantile: size mismatch");
  const std::size_t m = ref_nodes.size();
  return parallel_map(m, threads, [&](std::size_t i) {
    const double arg = gen.dphi(ref_nodes[i]) + weights[i] / lambda;
    try {
      return gen.inv_dphi(arg);
    } catch (const RangeError& e) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
      throw InfeasibleLambdaError("lambda = " + format_number(lambda) + " infeasible at node " + std::to_string(i) +
                                  " (u = " + format_number(u) + "): " + e.what());
    }
  });
}

/// Comonotonic Bregman-Wasserstein divergence B_phi(G, F) from two grids.
inline double bw_divergence(const ConvexGenerator& gen, std::span<const double> g_nodes,
                            std::span<const double> f_nodes, unsigned threads = 1) {
  const auto terms = parallel_map(g_nodes.size(), threads,
                                  [&](std::size_t i) { return gen.bregman(g_nodes[i], f_nodes[i]); });
  return mean_of(terms);
}

struct Calibration {
  double lambda = 0.0;
  std::vector<double> nodes;
  double divergence = 0.0;
  bool binding = false;
};

inline constexpr double kLambdaLo = 1e-8;
inline constexpr double kLambdaHi = 1e8;

/// Find lambda with B_phi(G_lambda, F) = eps by bisection on log(lambda).
inline Calibration calibrate_lambda(const ConvexGenerator& gen, std::span<const double> ref_nodes,
                                    std::span<const double> weights, double eps, double tol,
                                    unsigned threads = 1) {
  if (!(eps > 0.0)) throw DomainError("calibration: epsilon must be > 0");
  auto divergence = [&](double lambda) {
    try {
      const auto g = perturbed_quantile(gen, ref_nodes, weights, lambda, threads);
      return bw_divergence(gen, g, ref_nodes, threads);
    } catch (const InfeasibleLambdaError&) {
      return kInf;
    }
  };
  double lo = kLambdaLo, hi = kLambdaHi;
  double f_lo = divergence(lo), f_hi = divergence(hi);
  for (int k = 0; k < 4 && f_hi > eps; ++k) f_hi = divergence(hi *= 10.0);
  for (int k = 0; k < 4 && f_lo < eps; ++k) f_lo = divergence(lo /= 10.0);
  if (!(f_hi <= eps && f_lo >= eps)) {
    throw CalibrationError("no lambda in [" + format_number(lo) + ", " + format_number(hi) +
                           "] reaches epsilon = " + format_number(eps) + "; achieved divergence range [" +
                           format_number(f_hi) + ", " + format_number(f_lo) + "]");
  }
  for (int it = 0; it < 400 && hi / lo - 1.0 > 4e-16; ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (mid <= lo || mid >= hi) break;
    const double f = divergence(mid);
    if (f > eps) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
  }
  Calibration c;
  c.lambda = (std::isfinite(f_lo) && std::abs(f_lo - eps) < std::abs(f_hi - eps)) ? lo : hi;
  c.nodes = perturbed_quantile(gen, ref_nodes, weights, c.lambda, threads);
  c.divergence = bw_divergence(gen, c.nodes, ref_nodes, threads);
  c.binding = std::abs(c.divergence - eps) <= tol;
  return c;
}

struct WorstCaseSolution {
  double lambda_star = 0.0;
  QuantileGrid worst_quantile;
  double worst_value = 0.0;
  double reference_value = 0.0;
  double divergence_at_solution = 0.0;
  double epsilon = 0.0;
  bool binding = false;
  std::vector<std::string> warnings;
};

inline QuantileGrid worst_case_quantile(const ConvexGenerator& gen, const Distortion& d, const Distribution& ref,
                                        double lambda, const GridOptions& opt = {}) {
  const auto f = quantile_grid(ref, opt.grid_size, opt.delta);
  const auto w = distortion_weights(d, opt.grid_size);
  return QuantileGrid{perturbed_quantile(gen, f.nodes, w, lambda, opt.threads), opt.delta};
}

inline WorstCaseSolution solve_worst_case(const ConvexGenerator& gen, const Distortion& d, const Distribution& ref,
                                          double eps, const GridOptions& opt = {}, double tol = 1e-8) {
  WorstCaseSolution sol;
  sol.epsilon = eps;
  if (!gen.strict()) throw ConfigError("worst case: generator must be strictly convex");
  if (!d.strict()) sol.warnings.push_back("distortion " + d.name() + " is not strictly concave; optimiser may not be unique");

  const auto f = quantile_grid(ref, opt.grid_size, opt.delta);
  const auto w = distortion_weights(d, opt.grid_size);
  for (double x : w) {
    if (!std::isfinite(x)) throw DomainError("worst case: distortion weight not finite on the grid");
  }
  const auto cal = calibrate_lambda(gen, f.nodes, w, eps, tol, opt.threads);
  sol.lambda_star = cal.lambda;
  sol.worst_quantile = QuantileGrid{cal.nodes, opt.delta};
  sol.divergence_at_solution = cal.divergence;
  sol.binding = cal.binding;
  const auto worst = choquet(d, sol.worst_quantile);
  const auto base = choquet(d, f);
  sol.worst_value = worst.value;
  sol.reference_value = base.value;
  if (worst.truncation_warning || base.truncation_warning) {
    sol.warnings.push_back("distortion weight truncated at the grid edge");
  }
  return sol;
}

}  // namespace mkdiv
