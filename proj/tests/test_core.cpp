#include <gtest/gtest.h>

#include <oamkit/core.hpp>

#include "oracles.hpp"

using namespace oamkit;

namespace {

VortexPancake from_roots(cplx a0, double w0, const std::vector<cplx>& roots) {
  std::vector<Vortex> v;
  for (const auto& z : roots) v.push_back({std::abs(z), std::arg(z)});
  return VortexPancake(a0, w0, v);
}

}  // namespace

TEST(Angles, NormalizeAndWrap) {
  EXPECT_NEAR(normalize_angle(-0.5), kTwoPi - 0.5, 1e-15);
  EXPECT_NEAR(normalize_angle(7.0), 7.0 - kTwoPi, 1e-15);
  EXPECT_GE(normalize_angle(-1e-300), 0.0);
  EXPECT_LT(normalize_angle(-1e-300), kTwoPi);
  EXPECT_NEAR(wrap_phase(3.5), 3.5 - kTwoPi, 1e-15);
  EXPECT_NEAR(wrap_phase(-kPi), kPi, 1e-15);
}

TEST(LgMode, MatchesTextbookForm) {
  for (int m : {-3, -1, 0, 1, 2, 5}) {
    const LgModeP0 mode(m, 1.3);
    for (double x : {-0.7, 0.0, 0.4, 1.9})
      for (double y : {-1.1, 0.0, 0.6}) {
        const auto want = oracle::lg(m, 1.3, x, y);
        EXPECT_NEAR(std::abs(eval_lg_p0_xy(mode, x, y) - want), 0.0, 1e-14) << m << " " << x << " " << y;
      }
  }
}

TEST(LgMode, UnitPower) {
  for (int m : {0, 1, 3, 6}) {
    const LgModeP0 mode(m, 0.8);
    const double p = oracle::power([&](double x, double y) { return eval_lg_p0_xy(mode, x, y); }, 6.0);
    EXPECT_NEAR(p, 1.0, 1e-10) << "m=" << m;
  }
}

TEST(LgMode, RejectsBadWaist) {
  EXPECT_THROW(LgModeP0(1, 0.0), ValidationError);
  EXPECT_THROW(LgModeP0(1, -1.0), ValidationError);
}

TEST(Pancake, EvaluatesProductForm) {
  std::mt19937_64 rng(7);
  const auto roots = oracle::random_roots(rng, 4, 1.2);
  const cplx a0(0.3, -0.8);
  const auto p = from_roots(a0, 1.1, roots);
  for (double x : {-1.0, 0.25, 1.5})
    for (double y : {-0.3, 0.9}) {
      const auto want = oracle::pancake_field(a0, 1.1, roots, x, y);
      EXPECT_NEAR(std::abs(eval_pancake_xy(p, x, y) - want), 0.0, 1e-13);
      const double r = std::hypot(x, y), phi = std::atan2(y, x);
      EXPECT_NEAR(std::abs(eval_pancake(p, r, phi) - want), 0.0, 1e-13);
    }
}

TEST(Pancake, ZeroAtEveryVortex) {
  const VortexPancake p(1.0, 1.0, {{0.5, 1.0}, {1.2, 4.0}, {0.0, 0.0}});
  for (const auto& v : p.vortices()) EXPECT_LT(std::abs(eval_pancake(p, v.rho, v.phi)), 1e-15);
}

TEST(Pancake, NormalizesAnglesAndValidates) {
  const VortexPancake p(1.0, 1.0, {{0.5, -kPi / 2}});
  EXPECT_NEAR(p.vortices()[0].phi, 1.5 * kPi, 1e-15);
  EXPECT_THROW(VortexPancake(1.0, 0.0, {}), ValidationError);
  EXPECT_THROW(VortexPancake(1.0, 1.0, {{-0.1, 0.0}}), ValidationError);
  EXPECT_THROW(VortexPancake(1.0, 1.0, {{0.1, NAN}}), ValidationError);
  EXPECT_THROW(VortexPancake(cplx(INFINITY, 0.0), 1.0, {}), ValidationError);
}

TEST(Pancake, EmptyIsGaussian) {
  const VortexPancake p(2.0, 1.5, {});
  EXPECT_NEAR(std::abs(eval_pancake_xy(p, 0.4, -0.2) - 2.0 * std::exp(-0.2 / 2.25)), 0.0, 1e-15);
}

TEST(Necklace, SumsDisplacedPearls) {
  const NecklaceSpec n(1, 1.0, 2.0, {0.7, 0.1}, {0.2, -0.4});
  const double x = 0.3, y = -0.45;
  const auto want = cplx(0.7, 0.1) * oracle::lg(1, 1.0, x + 1.0, y) + cplx(0.2, -0.4) * oracle::lg(1, 1.0, x - 1.0, y);
  EXPECT_NEAR(std::abs(eval_necklace(n, x, y) - want), 0.0, 1e-14);
  EXPECT_THROW(NecklaceSpec(1, 1.0, -1.0, 1.0, 1.0), ValidationError);
}

TEST(Symmetric, MatchesSubsetEnumeration) {
  std::mt19937_64 rng(11);
  for (int n = 0; n <= 9; ++n) {
    const auto roots = oracle::random_roots(rng, n, 2.0);
    const auto all = elementary_symmetric_all(roots);
    ASSERT_EQ(all.size(), static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
      const auto want = oracle::esym_subsets(roots, k);
      EXPECT_NEAR(std::abs(all[k] - want), 0.0, 1e-12 * std::max(1.0, std::abs(want)));
      EXPECT_NEAR(std::abs(elementary_symmetric(roots, k) - want), 0.0, 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(Symmetric, OrderOutOfRangeThrows) {
  const std::vector<cplx> roots{1.0, 2.0};
  EXPECT_THROW(elementary_symmetric(roots, 3), ValidationError);
  EXPECT_THROW(elementary_symmetric(roots, -1), ValidationError);
}

TEST(Grid, CellCenters) {
  const auto g = GridSpec::square(4, 2.0, 1.0, -1.0);
  EXPECT_DOUBLE_EQ(g.x(0), 1.0 - 0.75);
  EXPECT_DOUBLE_EQ(g.x(3), 1.0 + 0.75);
  EXPECT_DOUBLE_EQ(g.y(0), -1.0 - 0.75);
  EXPECT_DOUBLE_EQ(g.half_width(), 1.0);
  EXPECT_THROW(GridSpec::square(1, 1.0), ValidationError);
  EXPECT_THROW(GridSpec::square(8, 0.0), ValidationError);
}

TEST(Grid, SampledFieldShapeChecked) {
  const auto g = GridSpec::square(4, 1.0);
  EXPECT_THROW(SampledField(g, std::vector<cplx>(15)), ValidationError);
  SampledField f(g);
  f.at(2, 1) = 3.0;
  EXPECT_EQ(f.values()[1 * 4 + 2], cplx(3.0));
}

TEST(Rasterize, DefaultGridHoldsUnitPower) {
  const auto f = rasterize(LgModeP0(2, 1.0));
  EXPECT_EQ(f.nx(), kDefaultGridSize);
  EXPECT_NEAR(f.power(), 1.0, 1e-12);
}

TEST(Rasterize, DefaultGridGrowsWithVortexReach) {
  const VortexPancake p(1.0, 1.0, {{5.0, 0.0}});
  const auto g = default_grid(p);
  EXPECT_GE(g.half_width(), 9.0);
  EXPECT_NO_THROW(rasterize(p));
}

TEST(Rasterize, RefusesClippingWindow) {
  const VortexPancake p(1.0, 1.0, {{3.0, 0.0}});
  EXPECT_THROW(rasterize(p, GridSpec::square(64, 2.0)), GridError);
  EXPECT_GT(clipped_power_fraction(p, GridSpec::square(64, 2.0)), 1e-6);
}

TEST(Rasterize, SamplesAtCellCenters) {
  const VortexPancake p({0.5, 0.5}, 1.0, {{0.4, 1.0}});
  const auto g = GridSpec::square(32, 10.0, 0.2, -0.1);
  const auto f = rasterize(p, g);
  EXPECT_EQ(f.at(5, 17), eval_pancake_xy(p, g.x(5), g.y(17)));
}
