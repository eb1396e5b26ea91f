#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mkdiv/assignment.hpp"
#include "mkdiv/network_simplex.hpp"
#include "mkdiv/rng.hpp"
#include "mkdiv/transport.hpp"
#include "mkdiv/verify.hpp"
#include "support.hpp"

using namespace mkdiv;
using mkdiv::testing::brute_force_optimum;

namespace {

const Score kQuad = Score::bregman(ConvexGenerator::quadratic());

std::vector<Score> base_catalog() {
  return {kQuad,
          Score::bregman(ConvexGenerator::quartic()),
          Score::gpl(MonotoneMap::identity(), 0.9),
          Score::gpl(MonotoneMap::cube(), 0.5),
          Score::expectile(ConvexGenerator::quadratic(), 0.7),
          Score::shortfall(LossFunction::linear()),
          Score::shortfall(LossFunction::exponential(1.0)),
          Score::lambda_quantile(StepFunction({0.5}, {0.3, 0.6})),
          Score::decomposable(2.0, 0.7, 0.3),
          Score::entropic(ConvexGenerator::quadratic(), 0.5)};
}

}  // namespace

TEST(MkDivergence, Examples) {
  EXPECT_EQ(mk_divergence(kQuad, from_samples({0, 1}), from_samples({2, 3})), 4.0);
  EXPECT_DOUBLE_EQ(mk_divergence(Score::gpl(MonotoneMap::identity(), 0.5), from_samples({0, 2}), from_samples({1, 3})),
                   0.5);
}

TEST(MkDivergence, SelfDivergenceIsZero) {
  const auto d = from_samples({0.3, 1.2, 2.5, 0.9});
  for (const auto& s : base_catalog()) EXPECT_EQ(mk_divergence(s, d, d), 0.0) << s.name();
  const GridOptions opt{2000, 1e-7, 1};
  for (const auto& s : base_catalog()) {
    EXPECT_EQ(mk_divergence(s, Distribution::normal(0, 0.5), Distribution::normal(0, 0.5), opt), 0.0) << s.name();
  }
}

TEST(MkDivergence, Asymmetric) {
  const auto s = Score::bregman(ConvexGenerator::quartic());
  const auto d0 = Distribution::point_mass(0), d1 = Distribution::point_mass(1);
  const GridOptions opt{10, 0.0, 1};
  // cost c(z1, z2) = S(z2, z1) = B(z1, z2).
  EXPECT_EQ(mk_divergence(s, d0, d1, opt), 3.0);
  EXPECT_EQ(mk_divergence(s, d1, d0, opt), 1.0);
}

TEST(MkDivergence, ParallelMatchesSerialBitwise) {
  const auto f1 = Distribution::normal(0, 1), f2 = Distribution::lognormal(0, 0.4);
  for (const auto& s : {kQuad, Score::gpl(MonotoneMap::identity(), 0.9), Score::shortfall(LossFunction::linear())}) {
    const double serial = mk_divergence(s, f1, f2, {20000, 1e-7, 1});
    const double par = mk_divergence(s, f1, f2, {20000, 1e-7, 4});
    EXPECT_EQ(serial, par);
  }
}

TEST(MkDivergence, ReportsDomainViolations) {
  const auto s = Score::bregman(ConvexGenerator::xlogx());
  EXPECT_THROW(mk_divergence(s, from_samples({-1, 1}), from_samples({1, 2})), DomainError);
}

TEST(Wasserstein, Examples) {
  EXPECT_EQ(wasserstein_p(from_samples({0, 1}), from_samples({2, 3}), 2), 2.0);
  EXPECT_EQ(wasserstein_p(Distribution::normal(0, 1), Distribution::normal(0, 1), 2), 0.0);
  EXPECT_NEAR(wasserstein_p(Distribution::normal(0, 1), Distribution::normal(1, 1), 2, {100000, 1e-7, 1}), 1.0, 1e-3);
  EXPECT_NEAR(wasserstein_p(from_samples({0, 1}), from_samples({2, 3}), 1), 2.0, 1e-15);
  EXPECT_THROW(wasserstein_p(from_samples({0}), from_samples({1}), 0.5), DomainError);
}

TEST(Wasserstein, BridgeToQuadraticBregman) {
  Rng rng(41);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = rng.index(2, 30);
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = rng.uniform(-5, 5);
    for (auto& x : b) x = rng.uniform(-5, 5);
    const double w = wasserstein_p(from_samples(a), from_samples(b), 2);
    EXPECT_NEAR(mk_divergence(kQuad, from_samples(a), from_samples(b)), w * w, 1e-12);
  }
}

TEST(Oracle, Examples) {
  const std::vector<double> a{0, 1}, b{2, 3};
  const auto rep = oracle_optimal(kQuad, a, b);
  EXPECT_EQ(rep.value, 4.0);
  EXPECT_EQ(rep.matching, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(rep.method, OracleMethod::assignment);

  for (const auto& s : base_catalog()) {
    const std::vector<double> same{0.2, 0.9, 1.7};
    const auto r = oracle_optimal(s, same, same);
    EXPECT_EQ(r.value, 0.0) << s.name();
    EXPECT_EQ(r.matching, (std::vector<std::size_t>{0, 1, 2})) << s.name();
  }

  const auto inv = osband_transform(kQuad, MonotoneMap::reciprocal());
  const std::vector<double> c{1, 2};
  const auto anti = oracle_optimal(inv, c, c);
  EXPECT_EQ(anti.matching, (std::vector<std::size_t>{1, 0}));
  EXPECT_LT(anti.value, coupling_value(inv, c, c, std::vector<std::size_t>{0, 1}));
}

TEST(CouplingValue, Examples) {
  const std::vector<double> a{0, 1}, b{2, 3};
  EXPECT_EQ(coupling_value(kQuad, a, b, std::vector<std::size_t>{0, 1}), 4.0);
  EXPECT_EQ(coupling_value(kQuad, a, b, std::vector<std::size_t>{1, 0}), 5.0);
  const std::vector<double> one{0.5}, other{2.0};
  EXPECT_EQ(coupling_value(kQuad, one, other, std::vector<std::size_t>{0}), 2.25);
  EXPECT_THROW(coupling_value(kQuad, a, b, std::vector<std::size_t>{0, 0}), DomainError);
}

TEST(Oracle, AgreesWithBruteForce) {
  Rng rng(42);
  for (const auto& s : base_catalog()) {
    for (int k = 0; k < 15; ++k) {
      const std::size_t n = rng.index(1, 6);
      std::vector<double> a(n), b(n);
      for (auto& x : a) x = rng.uniform(-2, 2);
      for (auto& x : b) x = rng.uniform(-2, 2);
      const double brute = brute_force_optimum(s, a, b);
      const auto rep = oracle_optimal(s, a, b);
      EXPECT_NEAR(rep.value, brute, 1e-12 * (1 + brute)) << s.name();
      EXPECT_NEAR(coupling_value(s, a, b, rep.matching), rep.value, 1e-12 * (1 + brute));
    }
  }
}

TEST(Oracle, LpAgreesWithAssignment) {
  Rng rng(43);
  for (const auto& s : base_catalog()) {
    for (int k = 0; k < 10; ++k) {
      const std::size_t n = rng.index(2, 8);
      std::vector<double> a(n), b(n), w(n, 1.0 / static_cast<double>(n));
      for (auto& x : a) x = rng.uniform(-2, 2);
      for (auto& x : b) x = rng.uniform(-2, 2);
      const auto ap = oracle_optimal(s, a, b);
      const auto lp = oracle_optimal(s, a, b, std::span<const double>(w), std::span<const double>(w));
      EXPECT_EQ(lp.method, OracleMethod::lp);
      EXPECT_NEAR(ap.value, lp.value, 1e-12 * (1 + ap.value)) << s.name();
    }
  }
}

TEST(Oracle, PlanMarginalsAndValue) {
  Rng rng(44);
  for (int k = 0; k < 30; ++k) {
    const std::size_t m = rng.index(1, 7), n = rng.index(1, 7);
    std::vector<double> a(m), b(n), w1(m), w2(n);
    for (auto& x : a) x = rng.uniform(-2, 2);
    for (auto& x : b) x = rng.uniform(-2, 2);
    for (auto& x : w1) x = rng.uniform(0.1, 1);
    for (auto& x : w2) x = rng.uniform(0.1, 1);
    const double s1 = std::accumulate(w1.begin(), w1.end(), 0.0), s2 = std::accumulate(w2.begin(), w2.end(), 0.0);
    for (auto& x : w1) x /= s1;
    for (auto& x : w2) x /= s2;
    const auto rep = oracle_optimal(kQuad, a, b, std::span<const double>(w1), std::span<const double>(w2));
    std::vector<double> rows(m, 0.0), cols(n, 0.0);
    double value = 0.0;
    for (const auto& e : rep.plan) {
      EXPECT_GE(e.mass, 0.0);
      rows[e.i] += e.mass;
      cols[e.j] += e.mass;
      value += e.mass * kQuad(b[e.j], a[e.i]);
    }
    for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(rows[i], w1[i], 1e-12);
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(cols[j], w2[j], 1e-12);
    EXPECT_NEAR(value, rep.value, 1e-12);
  }
}

TEST(Oracle, RejectsBadInput) {
  std::vector<double> big(65, 1.0);
  EXPECT_THROW(oracle_optimal(kQuad, big, big), CapacityError);
  const std::vector<double> a{0, 1}, b{2, 3}, bad{0.7, 0.7}, neg{1.5, -0.5};
  EXPECT_THROW(oracle_optimal(kQuad, a, b, std::span<const double>(bad), std::span<const double>(bad)), DomainError);
  EXPECT_THROW(oracle_optimal(kQuad, a, b, std::span<const double>(neg), std::span<const double>(neg)), DomainError);
}

TEST(MergedCoupling, UnequalSizesMatchLp) {
  Rng rng(45);
  for (const auto& s : base_catalog()) {
    for (int k = 0; k < 10; ++k) {
      const std::size_t m = rng.index(2, 7), n = rng.index(2, 7);
      std::vector<double> a(m), b(n);
      for (auto& x : a) x = rng.uniform(-2, 2);
      for (auto& x : b) x = rng.uniform(-2, 2);
      const std::vector<double> w1(m, 1.0 / m), w2(n, 1.0 / n);
      const auto lp = oracle_optimal(s, a, b, std::span<const double>(w1), std::span<const double>(w2));
      EXPECT_NEAR(mk_divergence(s, from_samples(a), from_samples(b)), lp.value, 1e-9 * (1 + lp.value)) << s.name();
    }
  }
}

TEST(Dominance, ClosedFormBelowRandomPermutations) {
  Rng rng(46);
  for (const auto& s : base_catalog()) {
    std::vector<double> a(6), b(6);
    for (auto& x : a) x = rng.uniform(-2, 2);
    for (auto& x : b) x = rng.uniform(-2, 2);
    const double closed = mk_divergence(s, from_samples(a), from_samples(b));
    std::vector<std::size_t> p(6);
    std::iota(p.begin(), p.end(), 0);
    for (int k = 0; k < 100; ++k) {
      for (std::size_t i = 5; i > 0; --i) std::swap(p[i], p[rng.index(0, i)]);
      EXPECT_LE(closed, coupling_value(s, a, b, p) + 1e-12) << s.name();
    }
  }
}

TEST(Certification, AntitonicTransforms) {
  for (const auto& s : {osband_transform(kQuad, MonotoneMap::reciprocal()),
                        dist_transform(kQuad, MonotoneMap::reciprocal())}) {
    EXPECT_EQ(s.coupling(), Coupling::antitonic);
    const auto rep = certify_coupling(s, 8, 50, 5);
    EXPECT_TRUE(rep.passed()) << s.name() << " " << rep.max_deviation;
  }
}

TEST(Assignment, HandlesTiesDeterministically) {
  CostMatrix c(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) c.data[i * 3 + j] = 1.0;
  }
  const auto r = solve_assignment(c);
  EXPECT_EQ(r.row_to_col, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(r.cost, 3.0);
}

TEST(TransportSimplex, SmallKnownProblem) {
  // Two sources, three sinks.
  const std::vector<double> supply{0.5, 0.5}, demand{0.25, 0.25, 0.5};
  const std::vector<double> cost{0, 1, 2, 2, 1, 0};
  const auto r = solve_transport(supply, demand, cost);
  EXPECT_NEAR(r.cost, 0.25, 1e-15);
}
