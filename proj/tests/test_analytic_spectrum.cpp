#include <gtest/gtest.h>

#include <oamkit/analytic_spectrum.hpp>

#include "oracles.hpp"

using namespace oamkit;

namespace {

VortexPancake from_roots(cplx a0, double w0, const std::vector<cplx>& roots) {
  std::vector<Vortex> v;
  for (const auto& z : roots) v.push_back({std::abs(z), std::arg(z)});
  return VortexPancake(a0, w0, v);
}

VortexPancake rotated(const VortexPancake& p, double alpha) {
  auto v = p.vortices();
  for (auto& x : v) x.phi += alpha;
  return VortexPancake(p.a0(), p.w0(), v);
}

}  // namespace

TEST(AnalyticSpectrum, MatchesDirectProjection) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 4;
    const auto roots = oracle::random_roots(rng, n, 1.3);
    const cplx a0(0.9, 0.4);
    const double w0 = 0.9;
    const auto p = from_roots(a0, w0, roots);
    const auto s = pancake_cn(p);
    const oracle::Field u = [&](double x, double y) { return oracle::pancake_field(a0, w0, roots, x, y); };
    for (int k = -1; k <= n + 1; ++k) {
      const double want = oracle::projection_cn(u, k, 7.0 * w0);
      EXPECT_NEAR(s.at(k), want, 1e-9 * s.total()) << "N=" << n << " n=" << k;
    }
  }
}

TEST(AnalyticSpectrum, TotalEqualsFieldPower) {
  std::mt19937_64 rng(5);
  const auto roots = oracle::random_roots(rng, 3, 1.0);
  const auto p = from_roots(1.0, 1.0, roots);
  const double want =
      oracle::power([&](double x, double y) { return oracle::pancake_field(1.0, 1.0, roots, x, y); }, 7.0);
  EXPECT_NEAR(pancake_cn(p).total(), want, 1e-9 * want);
}

TEST(AnalyticSpectrum, LgCoefficientsReconstructField) {
  std::mt19937_64 rng(9);
  const auto roots = oracle::random_roots(rng, 5, 1.4);
  const cplx a0(-0.2, 1.1);
  const auto p = from_roots(a0, 1.2, roots);
  const auto c = pancake_lg_coefficients(p);
  ASSERT_EQ(c.size(), 6u);
  for (double x : {-1.3, 0.1, 0.8})
    for (double y : {-0.6, 0.0, 1.7}) {
      cplx sum{};
      for (int l = 0; l <= 5; ++l) sum += c[l] * oracle::lg(l, 1.2, x, y);
      const auto want = oracle::pancake_field(a0, 1.2, roots, x, y);
      EXPECT_NEAR(std::abs(sum - want), 0.0, 1e-12 * std::max(1.0, std::abs(want)));
    }
  const auto s = pancake_cn(p);
  for (int l = 0; l <= 5; ++l) EXPECT_NEAR(std::norm(c[l]), s.at(l), 1e-12 * s.total());
}

TEST(AnalyticSpectrum, GaussianIsPureZero) {
  const auto w = pancake_weights(VortexPancake(1.0, 1.0, {}));
  EXPECT_EQ(w.weights.size(), 1u);
  EXPECT_DOUBLE_EQ(w.at(0), 1.0);
  EXPECT_DOUBLE_EQ(w.mean_oam, 0.0);
}

TEST(AnalyticSpectrum, AllOnAxisIsPureN) {
  const auto w = pancake_weights(VortexPancake(1.0, 1.0, {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}));
  EXPECT_DOUBLE_EQ(w.at(3), 1.0);
  EXPECT_DOUBLE_EQ(w.at(0), 0.0);
  EXPECT_DOUBLE_EQ(w.mean_oam, 3.0);
}

TEST(AnalyticSpectrum, WeightsIgnoreAmplitude) {
  const VortexPancake a(1.0, 1.0, {{0.3, 0.2}, {0.9, 2.5}});
  const VortexPancake b(cplx(-4.0, 3.0), 1.0, a.vortices());
  const auto wa = pancake_weights(a), wb = pancake_weights(b);
  for (int n = 0; n <= 2; ++n) EXPECT_NEAR(wa.at(n), wb.at(n), 1e-15);
  EXPECT_NEAR(pancake_cn(b).total(), 25.0 * pancake_cn(a).total(), 1e-12 * pancake_cn(b).total());
}

TEST(AnalyticSpectrum, WeightsInvariantUnderRotation) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = from_roots(1.0, 1.0, oracle::random_roots(rng, 4, 1.5));
    const auto q = rotated(p, 0.37 + trial);
    const auto wp = pancake_weights(p), wq = pancake_weights(q);
    for (int n = 0; n <= 4; ++n) EXPECT_NEAR(wp.at(n), wq.at(n), 1e-13);
  }
}

TEST(AnalyticSpectrum, WeightsNormalized) {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 8; ++n) {
    const auto w = pancake_weights(from_roots(1.0, 1.3, oracle::random_roots(rng, n, 2.0)));
    double s = 0.0, mean = 0.0;
    for (const auto& [k, p] : w.weights) {
      EXPECT_GE(p, 0.0);
      s += p;
      mean += k * p;
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_NEAR(w.mean_oam, mean, 1e-13);
  }
}

TEST(AnalyticSpectrum, SingleVortexHalfQuantum) {
  const VortexPancake p(1.0, 1.0, {{1.0 / std::sqrt(2.0), 0.4}});
  EXPECT_NEAR(pancake_weights(p).mean_oam, 0.5, 1e-15);
}

TEST(AnalyticSpectrum, TwoVortexClosedForm) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = from_roots(cplx(0.5, -1.0), 0.7 + 0.01 * trial, oracle::random_roots(rng, 2, 2.0));
    const auto s = pancake_cn(p);
    const auto c = n2_closed_form(p);
    for (int n = 0; n <= 2; ++n) EXPECT_NEAR(c[n], s.at(n), 1e-12 * s.total());
  }
  EXPECT_THROW(n2_closed_form(VortexPancake(1.0, 1.0, {{0.1, 0.0}})), ValidationError);
}

TEST(AnalyticSpectrum, LogSpaceAgreesAcrossThreshold) {
  // Same 21 roots, evaluated directly on the first 20 plus one on axis:
  // the extra root at 0 just shifts every mode by one.
  std::mt19937_64 rng(2);
  const auto roots = oracle::random_roots(rng, kDirectEvaluationMaxN, 1.0);
  auto shifted = roots;
  shifted.push_back(0.0);
  const auto s20 = pancake_cn(from_roots(1.0, 1.0, roots));
  const auto s21 = pancake_cn(from_roots(1.0, 1.0, shifted));
  for (int n = 0; n <= kDirectEvaluationMaxN; ++n)
    EXPECT_NEAR(s21.at(n + 1), s20.at(n) * 0.5 * (n + 1), 1e-10 * s21.at(n + 1) + 1e-300);
  EXPECT_DOUBLE_EQ(s21.at(0), 0.0);
}

TEST(AnalyticSpectrum, LargeNStaysFinite) {
  std::mt19937_64 rng(4);
  const auto p = from_roots(1.0, 1.0, oracle::random_roots(rng, 120, 3.0));
  const auto w = pancake_weights(p);
  double s = 0.0;
  for (const auto& [n, x] : w.weights) {
    ASSERT_TRUE(std::isfinite(x));
    s += x;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(WeightsFromCn, RejectsBadSpectra) {
  OamSpectrum zero;
  zero.entries[0] = 0.0;
  EXPECT_THROW(weights_from_cn(zero), ValidationError);
  OamSpectrum neg;
  neg.entries[0] = -1.0;
  EXPECT_THROW(weights_from_cn(neg), ValidationError);
}

TEST(WeightsFromCn, FillsGapsBetweenOccupiedModes) {
  OamSpectrum s;
  s.entries[-2] = 1.0;
  s.entries[3] = 3.0;
  const auto w = weights_from_cn(s);
  EXPECT_EQ(w.min_n(), -2);
  EXPECT_EQ(w.max_n(), 3);
  EXPECT_EQ(w.weights.size(), 6u);
  EXPECT_DOUBLE_EQ(w.at(0), 0.0);
  EXPECT_DOUBLE_EQ(w.mean_oam, (-2.0 + 9.0) / 4.0);
}
