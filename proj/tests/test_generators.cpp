#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mkdiv/generators.hpp"
#include "mkdiv/rng.hpp"

using namespace mkdiv;

const std::vector<ConvexGenerator> kGens{ConvexGenerator::quadratic(), ConvexGenerator::quartic(),
                                         ConvexGenerator::exponential(), ConvexGenerator::xlogx()};

TEST(Bregman, Examples) {
  EXPECT_EQ(bregman(ConvexGenerator::quadratic(), 3, 1), 4.0);
  EXPECT_EQ(bregman(ConvexGenerator::quartic(), 0, 1), 3.0);
  for (const auto& g : kGens) EXPECT_EQ(g.bregman(0.7, 0.7), 0.0) << g.name();
  EXPECT_THROW(ConvexGenerator::xlogx().bregman(-1, 1), DomainError);
}

TEST(InvDphi, Examples) {
  EXPECT_EQ(inv_dphi(ConvexGenerator::quadratic(), 4), 2.0);
  EXPECT_EQ(inv_dphi(ConvexGenerator::xlogx(), 1), 1.0);
  EXPECT_THROW(inv_dphi(ConvexGenerator::exponential(), -1), RangeError);
}

TEST(Generators, Properties) {
  Rng rng(21);
  for (const auto& g : kGens) {
    const double lo = g.in_domain(-1.0) ? -3.0 : 0.05;
    for (int k = 0; k < 300; ++k) {
      double a = rng.uniform(lo, 3.0), b = rng.uniform(lo, 3.0);
      const double d = g.bregman(a, b);
      EXPECT_GE(d, 0.0) << g.name();
      if (a != b) {
        EXPECT_GT(d, 0.0) << g.name();
      }
      EXPECT_NEAR(g.inv_dphi(g.dphi(a)), a, 1e-12 * (1 + std::abs(a))) << g.name();
      if (a > b) std::swap(a, b);
      if (a < b) {
        EXPECT_LT(g.dphi(a), g.dphi(b)) << g.name();
      }
    }
  }
}

TEST(DistortionWeight, Examples) {
  for (double u : {0.1, 0.5, 0.9}) EXPECT_EQ(distortion_weight(Distortion::identity(), u), 1.0);
  EXPECT_DOUBLE_EQ(distortion_weight(Distortion::dual_power(2), 0.25), 0.5);
  EXPECT_DOUBLE_EQ(distortion_weight(Distortion::tvar(0.9), 0.95), 10.0);
  EXPECT_EQ(distortion_weight(Distortion::tvar(0.9), 0.85), 0.0);
}

TEST(DistortionWeight, ValidatesParameters) {
  EXPECT_THROW(Distortion::dual_power(0.5), DomainError);
  EXPECT_THROW(Distortion::tvar(1.0), DomainError);
  EXPECT_THROW(Distortion::power(1.5), DomainError);
}

TEST(DistortionWeight, NonNegativeAndMonotone) {
  Rng rng(22);
  const std::vector<Distortion> ds{Distortion::identity(), Distortion::dual_power(3), Distortion::tvar(0.8),
                                   Distortion::power(0.5)};
  for (const auto& d : ds) {
    for (int k = 0; k < 300; ++k) {
      double a = rng.uniform(1e-6, 1 - 1e-6), b = rng.uniform(1e-6, 1 - 1e-6);
      if (a > b) std::swap(a, b);
      EXPECT_GE(d.weight(a), 0.0);
      EXPECT_LE(d.weight(a), d.weight(b)) << d.name();
    }
  }
}

TEST(DistortionWeight, IntegratesToOne) {
  const std::size_t m = 10000;
  for (const auto& d : {Distortion::identity(), Distortion::dual_power(2), Distortion::dual_power(4.5),
                        Distortion::tvar(0.9)}) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += d.weight((static_cast<double>(i) + 0.5) / m);
    EXPECT_NEAR(s / m, 1.0, 1e-6) << d.name();
  }
  // gamma is unbounded near u = 1 for the power family, so the midpoint rule
  // only converges slowly there.
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += Distortion::power(0.5).weight((static_cast<double>(i) + 0.5) / m);
  EXPECT_NEAR(s / m, 1.0, 1e-2);
}

TEST(Distortion, StrictnessFlags) {
  EXPECT_FALSE(Distortion::tvar(0.9).strict());
  EXPECT_FALSE(Distortion::identity().strict());
  EXPECT_FALSE(Distortion::dual_power(1).strict());
  EXPECT_TRUE(Distortion::dual_power(2).strict());
  EXPECT_TRUE(Distortion::power(0.3).strict());
}
