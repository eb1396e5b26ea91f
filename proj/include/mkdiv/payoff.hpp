#pragma once

// Cheapest payoff whose distribution lies in a Bregman-Wasserstein ball around
// a benchmark. Cost-efficient payoffs are anti-monotone in the state-price
// density xi, so a payoff is described by its quantile curve G and costs
// integral of F_xi^-1(1 - u) G^-1(u) du. With the signed weight
// gamma(u) = -F_xi^-1(1 - u) the problem is the worst-case distortion problem,
// and the robust engine solves it unchanged.

#include <cmath>
#include <string>
#include <vector>

#include "mkdiv/distributions.hpp"
#include "mkdiv/error.hpp"
#include "mkdiv/generators.hpp"
#include "mkdiv/numeric.hpp"
#include "mkdiv/robust.hpp"

namespace mkdiv {

struct MarketSpec {
  Distribution spd = Distribution::point_mass(1.0);  ///< law of xi under P
  double rate = 0.0;                                 ///< continuously compounded, per year
  double horizon = 1.0;                              ///< years
  bool normalized = false;                           ///< assert E[xi] = exp(-r T)
};

/// Validates the market and returns E[xi] on the grid.
inline double check_market(const MarketSpec& market, const GridOptions& opt = {}) {
  if (!(market.horizon > 0.0)) throw DomainError("market: horizon T must be > 0");
  const auto xi = support_points(market.spd, opt.grid_size, opt.delta);
  for (double x : xi) {
    if (!(x > 0.0)) throw DomainError("market: state-price density must be supported on (0, inf)");
  }
  const double mean = mean_of(xi);
  if (!std::isfinite(mean)) throw MomentError("market: E[xi] is not finite");
  if (market.normalized) {
    const double target = std::exp(-market.rate * market.horizon);
    if (std::abs(mean - target) > 1e-3 * target) {
      throw DomainError("market: E[xi] = " + format_number(mean) + " but exp(-rT) = " + format_number(target));
    }
  }
  return mean;
}

/// gamma(u_i) = -F_xi^-1(1 - u_i) on the midpoint grid.
inline std::vector<double> payoff_weights(const MarketSpec& market, const GridOptions& opt = {}) {
  const auto xi = quantile_grid(market.spd, opt.grid_size, opt.delta);
  const std::size_t m = xi.size();
  std::vector<double> w(m);
  // 1 - u_i is the midpoint of cell m - 1 - i.
  for (std::size_t i = 0; i < m; ++i) w[i] = -xi.nodes[m - 1 - i];
  return w;
}

/// Price of the cost-efficient payoff with quantile curve `g`.
inline double payoff_cost(const MarketSpec& market, const QuantileGrid& g, const GridOptions& opt = {}) {
  GridOptions o = opt;
  o.grid_size = g.size();
  o.delta = g.delta;
  const auto w = payoff_weights(market, o);
  std::vector<double> terms(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) terms[i] = -w[i] * g.nodes[i];
  return mean_of(terms);
}

struct PayoffSolution {
  double lambda_star = 0.0;
  QuantileGrid payoff_quantile;
  double cost = 0.0;
  double benchmark_cost = 0.0;  ///< cost of the cost-efficient payoff with the benchmark law
  double divergence_at_solution = 0.0;
  double epsilon = 0.0;
  bool binding = false;
  bool nonneg_violation = false;  ///< some quantile node is negative
};

inline PayoffSolution cheapest_payoff(const ConvexGenerator& gen, const Distribution& benchmark,
                                      const MarketSpec& market, double eps, const GridOptions& opt = {},
                                      double tol = 1e-8) {
  if (!gen.strict()) throw ConfigError("payoff: generator must be strictly convex");
  check_market(market, opt);
  const auto f = quantile_grid(benchmark, opt.grid_size, opt.delta);
  const auto w = payoff_weights(market, opt);
  const auto cal = calibrate_lambda(gen, f.nodes, w, eps, tol, opt.threads);

  PayoffSolution sol;
  sol.epsilon = eps;
  sol.lambda_star = cal.lambda;
  sol.payoff_quantile = QuantileGrid{cal.nodes, opt.delta};
  sol.divergence_at_solution = cal.divergence;
  sol.binding = cal.binding;
  sol.cost = payoff_cost(market, sol.payoff_quantile, opt);
  sol.benchmark_cost = payoff_cost(market, f, opt);
  for (double x : cal.nodes) {
    if (x < 0.0) {
      sol.nonneg_violation = true;
      break;
    }
  }
  return sol;
}

}  // namespace mkdiv
