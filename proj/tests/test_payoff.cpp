#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mkdiv/payoff.hpp"
#include "mkdiv/robust.hpp"

using namespace mkdiv;

namespace {
const auto kQuad = ConvexGenerator::quadratic();
const auto kU01 = Distribution::uniform(0, 1);
const GridOptions kGrid{10000, 1e-7, 1};
MarketSpec uniform_market() { return MarketSpec{kU01, 0.0, 1.0, false}; }
}  // namespace

TEST(PayoffCost, Examples) {
  const auto g = quantile_grid(kU01, 10000, 0.0);
  EXPECT_NEAR(payoff_cost(uniform_market(), g), 1.0 / 6.0, 1e-6);

  const QuantileGrid flat{std::vector<double>(10000, 3.0), 1e-7};
  const auto xi = Distribution::lognormal(-0.05, 0.2);
  EXPECT_NEAR(payoff_cost(MarketSpec{xi, 0.05, 1.0, false}, flat), 3.0 * quantile_grid(xi, 10000, 1e-7).mean(),
              1e-12);

  const double disc = std::exp(-0.02 * 2.0);
  const MarketSpec det{Distribution::point_mass(disc), 0.02, 2.0, true};
  const auto n = quantile_grid(Distribution::normal(1, 1), 10000, 1e-7);
  EXPECT_NEAR(payoff_cost(det, n), disc * n.mean(), 1e-12);
}

TEST(CheapestPayoff, AnalyticReduction) {
  const auto sol = cheapest_payoff(kQuad, kU01, uniform_market(), 1.0 / 48.0, kGrid);
  EXPECT_NEAR(sol.lambda_star, 2.0, 1e-6);
  EXPECT_NEAR(sol.cost, 1.0 / 12.0, 1e-5);
  EXPECT_TRUE(sol.nonneg_violation);
  EXPECT_LE(std::abs(sol.divergence_at_solution - 1.0 / 48.0), 1e-8);
  EXPECT_TRUE(sol.binding);
}

TEST(CheapestPayoff, DybvigLimit) {
  const auto sol = cheapest_payoff(kQuad, kU01, uniform_market(), 1e-10, kGrid);
  EXPECT_NEAR(sol.cost, 1.0 / 6.0, 1e-4);
  EXPECT_NEAR(sol.benchmark_cost, 1.0 / 6.0, 1e-6);
}

TEST(CheapestPayoff, PointMassBenchmark) {
  const double c = 2.0;
  const MarketSpec market{Distribution::lognormal(-0.02, 0.25), 0.0, 1.0, false};
  const double e_xi = quantile_grid(market.spd, 10000, 1e-7).mean();
  for (double eps : {0.01, 0.1}) {
    const auto sol = cheapest_payoff(kQuad, Distribution::point_mass(c), market, eps, kGrid);
    EXPECT_LT(sol.cost, c * e_xi);
    const auto xi = quantile_grid(market.spd, 10000, 1e-7);
    for (std::size_t i = 0; i < 10000; i += 113) {
      EXPECT_NEAR(sol.payoff_quantile.nodes[i], c - xi.nodes[9999 - i] / (2 * sol.lambda_star), 1e-12);
    }
  }
}

TEST(CheapestPayoff, CostDecreasingAndDominated) {
  const MarketSpec market{Distribution::lognormal(-0.045, 0.3), 0.0, 1.0, false};
  const auto bench = Distribution::lognormal(0.05, 0.2);
  double prev = kInf;
  for (double eps : {0.001, 0.004, 0.016, 0.064}) {
    const auto sol = cheapest_payoff(kQuad, bench, market, eps, kGrid);
    EXPECT_LT(sol.cost, prev);
    EXPECT_LE(sol.cost, sol.benchmark_cost);
    EXPECT_LE(std::abs(sol.divergence_at_solution - eps), 1e-8);
    prev = sol.cost;
  }
}

TEST(CheapestPayoff, SameEngineAsWorstCase) {
  const MarketSpec market{Distribution::lognormal(-0.045, 0.3), 0.0, 1.0, false};
  const auto bench = Distribution::normal(1, 0.3);
  const auto sol = cheapest_payoff(ConvexGenerator::quartic(), bench, market, 0.01, kGrid);
  const auto ref = quantile_grid(bench, kGrid.grid_size, kGrid.delta);
  const auto via_engine =
      perturbed_quantile(ConvexGenerator::quartic(), ref.nodes, payoff_weights(market, kGrid), sol.lambda_star);
  ASSERT_EQ(via_engine.size(), sol.payoff_quantile.size());
  for (std::size_t i = 0; i < via_engine.size(); ++i) EXPECT_NEAR(via_engine[i], sol.payoff_quantile.nodes[i], 1e-12);
  EXPECT_NEAR(sol.cost, payoff_cost(market, sol.payoff_quantile, kGrid), 1e-12);
}

TEST(Market, Validation) {
  EXPECT_THROW(check_market(MarketSpec{Distribution::normal(1, 1), 0, 1, false}, kGrid), DomainError);
  EXPECT_THROW(check_market(MarketSpec{kU01, 0, 0, false}, kGrid), DomainError);
  EXPECT_THROW(check_market(MarketSpec{Distribution::lognormal(0, 0.2), 0.05, 1, true}, kGrid), DomainError);
  const double mu = -0.05 - 0.5 * 0.2 * 0.2;
  EXPECT_NO_THROW(check_market(MarketSpec{Distribution::lognormal(mu, 0.2), 0.05, 1, true}, kGrid));
}
