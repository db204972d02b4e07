#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "convsdf/distance.hpp"
#include "convsdf/shapes.hpp"
#include "convsdf/sign.hpp"
#include "oracles.hpp"

using namespace convsdf;

namespace {

std::vector<Point> snapped_polygon(const std::vector<Point>& poly, const GridSpec& g) {
  return shapes::snap_curve(poly, g);
}

std::vector<Point> regular_polygon(Point c, double r, int n) {
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) {
    double a = 2.0 * std::numbers::pi * i / n;
    out.push_back({c[0] + r * std::cos(a), c[1] + r * std::sin(a), 0.0});
  }
  return out;
}

}  // namespace

TEST(Winding, CenterOfPolygonIsOne) {
  GridSpec g({-1.0, -1.0}, 1.0 / 32, {65, 65});
  auto poly = snapped_polygon(regular_polygon({0, 0, 0}, 0.6, 64), g);
  auto sf = winding_field(Curve2D(poly), g, PrecisionConfig::native(1.0));
  std::size_t center = g.index(NodeIndex{32, 32, 0});
  EXPECT_NEAR(sf.mu[center], 1.0, 0.05);
  EXPECT_NEAR(sf.mu[center], oracle::winding_angle(poly, g.position(center)), 0.05);
  std::size_t corner = 0;
  EXPECT_LT(std::abs(sf.mu[corner]), 0.1);
}

TEST(Winding, FftMatchesDirectSummation) {
  GridSpec g({0.0, 0.0}, 1.0 / 64, {64, 64});
  std::mt19937_64 rng(3);
  auto poly = snapped_polygon(oracle::star_polygon(rng, {0.5, 0.5, 0}, 0.2, 0.4, 0.5 / 64), g);
  Curve2D curve(poly);
  for (auto cfg : {PrecisionConfig::big(1.0, 512), PrecisionConfig::native(1.0)}) {
    auto sf = winding_field(curve, g, cfg);
    double worst = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      worst = std::max(worst, std::abs(sf.mu[i] - oracle::winding_sum(poly, g.position(i))));
    EXPECT_LE(worst, 1e-10) << cfg.label();
  }
}

// Tangents sit at the start of each segment, so reversal negates mu only up
// to the quadrature error, which fades away from the curve.
TEST(Winding, ReversalNegates) {
  GridSpec g({0.0, 0.0}, 1.0 / 64, {40, 40});
  auto poly = snapped_polygon(regular_polygon({0.3, 0.3, 0}, 0.2, 80), g);
  Curve2D curve(poly);
  auto a = winding_field(curve, g, PrecisionConfig::native(1.0));
  auto b = winding_field(curve.reversed(), g, PrecisionConfig::native(1.0));
  auto ca = classify(a.mu, a.flagged, SignMode::winding2d);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (ca.low_confidence[i]) continue;
    EXPECT_EQ(std::round(a.mu[i]), -std::round(b.mu[i]));
    if (oracle::boundary_distance(poly, g.position(i)) > 3 * g.spacing()) EXPECT_NEAR(a.mu[i], -b.mu[i], 2e-2);
  }
}

TEST(Winding, TranslationPermutesValues) {
  GridSpec g({0.0, 0.0}, 1.0 / 64, {40, 40});
  GridSpec moved({3.0 / 64, -5.0 / 64}, 1.0 / 64, {40, 40});
  auto poly = snapped_polygon(regular_polygon({0.3, 0.3, 0}, 0.15, 60), g);
  std::vector<Point> shifted;
  for (auto p : poly) shifted.push_back({p[0] + 3.0 / 64, p[1] - 5.0 / 64, 0});
  auto a = winding_field(Curve2D(poly), g, PrecisionConfig::native(1.0));
  auto b = winding_field(Curve2D(shifted), moved, PrecisionConfig::native(1.0));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a.mu[i], b.mu[i], 1e-12);
}

TEST(Winding, ClassificationMatchesRayCast) {
  GridSpec g({0.0, 0.0}, 1.0 / 128, {129, 129});
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    auto poly = snapped_polygon(oracle::star_polygon(rng, {0.5, 0.5, 0}, 0.15, 0.4, 0.25 / 128), g);
    auto sf = winding_field(Curve2D(poly), g, PrecisionConfig::native(1.0));
    auto cls = classify(sf.mu, sf.flagged, SignMode::winding2d);
    std::size_t band = 0, agree = 0, binary = 0, unflagged = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      Point x = g.position(i);
      if (!cls.low_confidence[i]) {
        ++unflagged;
        binary += std::min(std::abs(sf.mu[i]), std::abs(sf.mu[i] - 1.0)) <= 0.25;
      }
      if (oracle::boundary_distance(poly, x) <= g.spacing()) continue;
      ++band;
      agree += bool(cls.inside[i]) == oracle::inside_polygon(poly, x);
    }
    EXPECT_GE(double(agree) / band, 0.999);
    EXPECT_GE(double(binary) / unflagged, 0.99);
  }
}

TEST(Winding, Rejects3DGrid) {
  GridSpec g({0.0, 0.0, 0.0}, 0.1, {4, 4, 4});
  Curve2D c({{0, 0, 0}, {0.2, 0, 0}, {0.1, 0.2, 0}});
  EXPECT_THROW(winding_field(c, g, PrecisionConfig::native(1.0)), ValidationError);
}

TEST(Degree, FftMatchesDirectSummation) {
  GridSpec g({-0.2, -0.2, -0.2}, 0.025, {16, 16, 16});
  Surface3D s = triangulate_and_orient(shapes::sphere(0.12, 2));
  auto ps = snap_points(s.centers(), g);
  std::vector<Point> centers, weights;
  for (std::size_t k = 0; k < s.size(); ++k) {
    centers.push_back(g.position(ps.snapped()[k]));
    const Point& n = s.normals()[k];
    weights.push_back({s.areas()[k] * n[0], s.areas()[k] * n[1], s.areas()[k] * n[2]});
  }
  for (auto cfg : {PrecisionConfig::big(1.0, 512), PrecisionConfig::native(1.0)}) {
    auto sf = degree_field(s, g, cfg);
    double worst = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      worst = std::max(worst, std::abs(sf.mu[i] - oracle::flux_sum(centers, weights, g.position(i))));
    EXPECT_LE(worst, 1e-10) << cfg.label();
  }
}

TEST(Degree, CubeInsideAndOutside) {
  GridSpec g({-0.125, -0.125, -0.125}, 1.0 / 128, {33, 33, 33});
  Surface3D s = triangulate_and_orient(shapes::cube(0.08, 20));
  auto sf = degree_field(s, g, PrecisionConfig::native(1.0));
  auto cls = classify(sf.mu, sf.flagged, SignMode::degree3d);
  EXPECT_EQ(cls.inside[g.index(NodeIndex{16, 16, 16})], 1);
  EXPECT_NEAR(sf.mu[g.index(NodeIndex{16, 16, 16})], 1.0, 0.05);
  EXPECT_EQ(cls.inside[0], 0);
  EXPECT_LT(std::abs(sf.mu[0]), 0.1);
  std::size_t band = 0, agree = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Point x = g.position(i);
    double m = std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
    if (std::abs(m - 0.08) <= g.spacing()) continue;
    ++band;
    agree += bool(cls.inside[i]) == (m < 0.08);
  }
  EXPECT_GE(double(agree) / band, 0.999);
}

TEST(Degree, Rejects2DGrid) {
  GridSpec g({0.0, 0.0}, 0.1, {4, 4});
  Surface3D s = triangulate_and_orient(shapes::cube(0.1, 1));
  EXPECT_THROW(degree_field(s, g, PrecisionConfig::native(1.0)), ValidationError);
}

TEST(Classify, RoundingRules) {
  GridSpec g({0.0}, 1.0, {6});
  ScalarField mu(g, {0.97, 0.04, 0.5, -0.6, 1.49, 0.49});
  auto w = classify(mu, {}, SignMode::winding2d);
  EXPECT_EQ(w.inside[0], 1);
  EXPECT_EQ(w.inside[1], 0);
  EXPECT_EQ(w.inside[2], 1);  // round half away from zero
  EXPECT_EQ(w.inside[3], 0);
  EXPECT_EQ(w.inside[4], 1);
  EXPECT_EQ(w.inside[5], 0);
  auto d = classify(mu, {}, SignMode::degree3d);
  EXPECT_EQ(d.inside[0], 1);
  EXPECT_EQ(d.inside[5], 0);
  auto t = classify(mu, {}, SignMode::winding2d, 0.45);
  EXPECT_EQ(t.inside[5], 1);
  EXPECT_EQ(t.inside[1], 0);
}

TEST(Classify, FlaggedNodesCopyNearestUnflagged) {
  GridSpec g({0.0}, 1.0, {6});
  ScalarField mu(g, {1.0, 1.0, 40.0, -40.0, 0.0, 0.0});
  auto c = classify(mu, {2, 3}, SignMode::winding2d);
  EXPECT_EQ(c.inside[2], 1);
  EXPECT_EQ(c.inside[3], 0);
  EXPECT_EQ(c.low_confidence[2], 1);
  EXPECT_EQ(c.low_confidence[1], 0);
  EXPECT_THROW(classify(mu, {9}, SignMode::winding2d), ValidationError);
}

TEST(SignedDistance, MaskApplies) {
  GridSpec g({0.0}, 1.0, {3});
  ScalarField s(g, {0.5, 1.0, 2.0});
  auto in = signed_distance(s, Mask(g, {1, 1, 1}));
  auto out = signed_distance(s, Mask(g, {0, 0, 0}));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(in[i], s[i]);
    EXPECT_EQ(out[i], -s[i]);
  }
}

TEST(SignedDistance, CircleFlipsAcrossBoundary) {
  GridSpec g({-0.5, -0.5}, 1.0 / 64, {65, 65});
  auto poly = snapped_polygon(regular_polygon({0, 0, 0}, 0.3, 200), g);
  auto ps = snap_points(poly, g);
  auto s = r_exact(ps, g);
  auto sf = winding_field(Curve2D(poly), g, PrecisionConfig::native(1.0));
  auto cls = classify(sf.mu, sf.flagged, SignMode::winding2d);
  auto sd = signed_distance(s, cls.inside);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Point x = g.position(i);
    if (oracle::boundary_distance(poly, x) <= g.spacing()) continue;
    EXPECT_EQ(sd[i] > 0, oracle::inside_polygon(poly, x));
  }
}

TEST(Surface, CylinderNormalsFaceOutward) {
  Surface3D s = triangulate_and_orient(shapes::cylinder(0.06, 0.09, 96, 48, 16));
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_GT(vec::dot(s.centers()[k], s.normals()[k]), 0.0);
}
