#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "convsdf/distance.hpp"
#include "oracles.hpp"

using namespace convsdf;

TEST(KernelExp, Values) {
  GridSpec g({0.0, 0.0}, 0.01, {11, 11});
  auto cfg = PrecisionConfig::native(0.05);
  auto k = kernel_exp<double>(g, cfg);
  EXPECT_EQ(k.at({0, 0, 0}), 1.0);
  EXPECT_NEAR(k.at({3, 4, 0}), std::exp(-1.0), 1e-15);  // |X| = 0.05 = tau
  EXPECT_EQ(k.at({-3, 4, 0}), k.at({3, -4, 0}));
}

TEST(KernelExp, DeepUnderflowOnlyInBigfloat) {
  GridSpec g({0.0}, 0.01, {11});
  auto big = kernel_exp<BigFloat>(g, PrecisionConfig::big(1e-4, 512));
  const BigFloat& v = big.at({10, 0, 0});
  long e = 0;
  double m = v.frexp(e);
  EXPECT_NEAR(std::log(m) + e * std::log(2.0), -1000.0, 1e-9);
  EXPECT_EQ(kernel_exp<double>(g, PrecisionConfig::native(1e-4)).at({10, 0, 0}), 0.0);
}

TEST(ImpulseField, Counts) {
  GridSpec g({0.0, 0.0}, 1.0, {4, 4});
  std::vector<Point> one{{1, 2, 0}};
  auto f = impulse_field(snap_points(one, g), g);
  double sum = 0;
  for (double v : f.values()) sum += v;
  EXPECT_EQ(sum, 1.0);
  std::vector<Point> all;
  for (std::size_t i = 0; i < g.size(); ++i) all.push_back(g.position(i));
  auto fa = impulse_field(snap_points(all, g), g);
  for (double v : fa.values()) EXPECT_EQ(v, 1.0);
}

TEST(ImpulseField, SumEqualsDistinctNodes) {
  auto g = GridSpec::from_bounds({-0.121, -0.121}, {0.121, 0.121}, 1.0 / 512);
  std::mt19937_64 rng(11);
  auto ps = snap_points(oracle::random_points(rng, g, 5000), g);
  auto f = impulse_field(ps, g);
  std::set<std::size_t> distinct(ps.snapped().begin(), ps.snapped().end());
  double sum = 0;
  for (double v : f.values()) sum += v;
  EXPECT_EQ(sum, double(distinct.size()));
}

TEST(Distance, SingleSourceIsExact) {
  GridSpec g({0.0, 0.0}, 0.05, {20, 20});
  std::vector<Point> pts{{0.35, 0.6, 0}};
  auto ps = snap_points(pts, g);
  auto cfg = PrecisionConfig::big(0.01, 512);
  auto s = s_fft(ps, g, cfg);
  auto sd = s_direct(ps, g, cfg);
  auto r = r_exact(ps, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(s[i], r[i], 1e-12);
    EXPECT_EQ(sd[i], r[i]);
  }
}

TEST(Distance, EquidistantPairSubtractsLog2) {
  GridSpec g({0.0}, 0.1, {11});
  std::vector<Point> pts{{0.2, 0, 0}, {0.8, 0, 0}};
  auto cfg = PrecisionConfig::big(0.01, 256);
  auto s = s_fft(snap_points(pts, g), g, cfg);
  EXPECT_NEAR(s[5], 0.3 - 0.01 * std::log(2.0), 1e-14);
}

TEST(Distance, RExactMatchesIndependentOracle) {
  GridSpec g({0.0, 0.0}, 1.0 / 16, {16, 16});
  std::mt19937_64 rng(12);
  auto pts = oracle::random_points(rng, g, 3);
  auto r = r_exact(pts, g);
  auto ref = oracle::exact_distance(g, pts);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(r[i], ref[i], 1e-15);
  std::vector<Point> one{{0.25, 0, 0}};
  GridSpec line({0.0}, 0.125, {9});
  auto r1 = r_exact(one, line);
  for (std::size_t i = 0; i < line.size(); ++i) EXPECT_DOUBLE_EQ(r1[i], std::abs(i * 0.125 - 0.25));
  EXPECT_EQ(r1[2], 0.0);
}

TEST(Distance, DirectIsBelowExactWithinBound) {
  GridSpec g({0.0, 0.0}, 1.0 / 32, {32, 32});
  std::mt19937_64 rng(13);
  auto pts = oracle::random_points(rng, g, 40);
  auto cfg = PrecisionConfig::native(0.02);
  auto s = s_direct(pts, g, cfg);
  auto r = r_exact(pts, g);
  double bound = error_bound(cfg, 40);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_GE(r[i] - s[i], 0.0);
    EXPECT_LE(r[i] - s[i], bound);
  }
}

TEST(Distance, DirectMatchesLongDoubleSoftMin) {
  GridSpec g({0.0, 0.0}, 1.0 / 16, {16, 16});
  std::mt19937_64 rng(14);
  auto pts = oracle::random_points(rng, g, 25);
  auto cfg = PrecisionConfig::native(0.003);
  auto s = s_direct(pts, g, cfg);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(s[i], double(oracle::soft_min(g.position(i), pts, 0.003L)), 1e-14);
}

TEST(Distance, FftPathMatchesDirectAtHighPrecision) {
  GridSpec g({0.0, 0.0}, 1.0 / 64, {64, 64});
  std::mt19937_64 rng(15);
  auto pts = oracle::random_nodes(rng, g, 30);
  auto cfg = PrecisionConfig::big(0.01, 512);
  auto ps = snap_points(pts, g);
  auto s = s_fft(ps, g, cfg);
  auto sd = s_direct(ps, g, cfg);
  double worst = 0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(s[i] - sd[i]));
  EXPECT_LE(worst, 1e-10);
}

TEST(Distance, SourceNodeBounds) {
  GridSpec g({0.0, 0.0}, 1.0 / 32, {32, 32});
  std::mt19937_64 rng(16);
  auto pts = oracle::random_nodes(rng, g, 50);
  auto ps = snap_points(pts, g);
  auto cfg = PrecisionConfig::big(0.02, 256);
  auto phi = phi_fft(ps, g, cfg);
  auto s = s_from_phi(phi, cfg);
  for (std::size_t n : ps.unique_nodes()) {
    EXPECT_GE(phi.log(n), 0.0);
    EXPECT_LE(s[n], 0.0);
    EXPECT_GE(s[n], -error_bound(cfg, 50) - 1e-15);
  }
}

TEST(Distance, NativeFftIsAccurateWhenWellConditioned) {
  GridSpec g({0.0, 0.0}, 0.05, {20, 20});
  std::vector<Point> pts{{0.35, 0.6, 0}, {0.1, 0.1, 0}};
  auto ps = snap_points(pts, g);
  auto cfg = PrecisionConfig::native(0.5);
  auto s = s_fft(ps, g, cfg);
  auto sd = s_direct(ps, g, cfg);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(s[i], sd[i], 1e-13);
}

TEST(Distance, NativeUnderflowRaisesPrecisionError) {
  GridSpec g({0.0, 0.0}, 1.0 / 32, {32, 32});
  std::vector<Point> pts{{0, 0, 0}};
  EXPECT_THROW(phi_fft(snap_points(pts, g), g, PrecisionConfig::native(1e-4)), PrecisionError);
}

TEST(Distance, MonotoneInTau) {
  GridSpec g({0.0, 0.0}, 1.0 / 32, {32, 32});
  std::mt19937_64 rng(17);
  auto pts = oracle::random_points(rng, g, 20);
  auto a = s_direct(pts, g, PrecisionConfig::native(0.001));
  auto b = s_direct(pts, g, PrecisionConfig::native(0.01));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_GE(a[i], b[i] - 1e-12);
}

TEST(Distance, WorksIn1DAnd3D) {
  GridSpec g1({0.0}, 0.1, {30});
  GridSpec g3({0.0, 0.0, 0.0}, 0.1, {9, 8, 7});
  auto cfg = PrecisionConfig::big(0.05, 256);
  for (const GridSpec& g : {g1, g3}) {
    std::mt19937_64 rng(18);
    auto pts = oracle::random_nodes(rng, g, 5);
    auto ps = snap_points(pts, g);
    auto s = s_fft(ps, g, cfg);
    auto sd = s_direct(ps, g, cfg);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(s[i], sd[i], 1e-12);
  }
}

TEST(ErrorBound, Values) {
  EXPECT_EQ(error_bound(PrecisionConfig::native(0.3), 1), 0.0);
  EXPECT_NEAR(error_bound(PrecisionConfig::native(0.01), std::exp(1.0)), 0.01, 1e-17);
  EXPECT_NEAR(error_bound(PrecisionConfig::native(5e-5), 5000), 4.2586e-4, 1e-8);
  EXPECT_THROW(error_bound(PrecisionConfig::native(0.01), 0), ValidationError);
}
