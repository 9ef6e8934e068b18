#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "heatfm/error.hpp"
#include "heatfm/geometry.hpp"
#include "oracles.hpp"

using namespace heatfm;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(MakeCurve, FourNodeCircle) {
  const BoundaryCurve c = make_curve(CurveSpec::circle(0.0, 0.0, 1.0), 4);
  ASSERT_EQ(c.size(), 4);
  for (int i = 0; i < 4; ++i) {
    const double angle = i * kPi / 2.0;
    EXPECT_NEAR(c.nodes[i].x(), std::cos(angle), 1e-15);
    EXPECT_NEAR(c.nodes[i].y(), std::sin(angle), 1e-15);
    EXPECT_NEAR(c.weights[i], 2.0 * kPi / 4.0, 1e-15);
  }
}

TEST(MakeCurve, CircleWeightsSumToCircumference) {
  for (int m : {5, 16, 33, 128}) {
    const BoundaryCurve c = make_curve(CurveSpec::circle(0.3, -0.2, 1.0), m);
    EXPECT_NEAR(c.perimeter(), 2.0 * kPi, 1e-12) << "M = " << m;
  }
}

TEST(MakeCurve, KitePerimeterMatchesAdaptiveQuadrature) {
  const CurveSpec kite = CurveSpec::kite(0.0, 0.0, 1.0);
  const double ref = oracle::integrate(
      [](double t) { return std::hypot(-std::sin(t) - 1.3 * std::sin(2.0 * t), 1.5 * std::cos(t)); }, 0.0, 2.0 * kPi);
  EXPECT_NEAR(make_curve(kite, 64).perimeter(), ref, 1e-3);
}

TEST(MakeCurve, NormalsAreOutwardUnitVectors) {
  for (const CurveSpec& spec : {CurveSpec::circle(0, 0, 1), CurveSpec::ellipse(0.1, 0, 1.2, 0.7),
                                CurveSpec::kite(0, 0, 1), CurveSpec::peanut(0, 0, 1)}) {
    const BoundaryCurve c = make_curve(spec, 64);
    for (int i = 0; i < c.size(); ++i) {
      EXPECT_NEAR(c.normals[i].norm(), 1.0, 1e-14);
      EXPECT_FALSE(point_in_region(c.nodes[i] + 1e-3 * c.normals[i], spec));
      EXPECT_TRUE(point_in_region(c.nodes[i] - 1e-3 * c.normals[i], spec));
    }
  }
}

TEST(MakeCurve, CircleCurvatureIsInverseRadius) {
  const BoundaryCurve c = make_curve(CurveSpec::circle(0, 0, 0.5), 16);
  for (double k : c.curvature) EXPECT_NEAR(k, 2.0, 1e-12);
}

TEST(MakeCurve, RejectsTooFewNodes) {
  EXPECT_THROW(make_curve(CurveSpec::circle(0, 0, 1), 2), GeometryError);
}

TEST(PointInRegion, CenterAndFarPoint) {
  const CurveSpec c = CurveSpec::circle(1.0, 2.0, 0.5);
  EXPECT_TRUE(point_in_region(Vec2(1.0, 2.0), c));
  EXPECT_FALSE(point_in_region(Vec2(2.0, 2.0), c));
}

TEST(PointInRegion, OnBoundaryIsAnError) {
  const CurveSpec c = CurveSpec::circle(0.0, 0.0, 0.5);
  EXPECT_THROW(point_in_region(Vec2(0.5 * (1.0 + 1e-12), 0.0), c), GeometryError);
}

TEST(PointInRegion, DiscreteCurveOverloadAgrees) {
  const BoundaryCurve kite = make_curve(CurveSpec::kite(0, 0, 1), 32);
  for (const Vec2& y : {Vec2(0, 0), Vec2(-1.2, 0.3), Vec2(2, 2), Vec2(0.2, 1.4)}) {
    EXPECT_EQ(point_in_region(y, kite), point_in_region(y, kite.spec));
  }
}

TEST(Geometry, ClosestPointOnCircle) {
  const ClosestPoint cp = closest_point(Vec2(2.0, 0.0), CurveSpec::circle(0, 0, 1));
  EXPECT_NEAR(cp.distance, 1.0, 1e-10);
  EXPECT_NEAR(std::remainder(cp.tau, 2.0 * kPi), 0.0, 1e-6);
}

TEST(Geometry, WindingNumber) {
  EXPECT_EQ(winding_number(Vec2(0.1, 0.0), CurveSpec::peanut(0, 0, 1)), 1);
  EXPECT_EQ(winding_number(Vec2(3.0, 0.0), CurveSpec::peanut(0, 0, 1)), 0);
}

TEST(CurveSpec, ParseRoundTrip) {
  const CurveSpec s = CurveSpec::parse("ellipse 0.1 -0.2 1.5 0.75");
  EXPECT_EQ(s.kind, CurveKind::ellipse);
  const CurveSpec t = CurveSpec::parse(s.to_string());
  EXPECT_EQ(t.params, s.params);
}

TEST(CurveSpec, ParseErrors) {
  EXPECT_THROW(CurveSpec::parse("square 0 0 1"), GeometryError);
  EXPECT_THROW(CurveSpec::parse("circle 0 0"), GeometryError);
  EXPECT_THROW(CurveSpec::parse("circle 0 0 -1"), GeometryError);
  EXPECT_THROW(CurveSpec::parse("circle 0 0 abc"), GeometryError);
}

TEST(Geometry, Nesting) {
  EXPECT_NO_THROW(require_nested(CurveSpec::circle(0, 0, 0.35), CurveSpec::circle(0, 0, 1)));
  EXPECT_THROW(require_nested(CurveSpec::circle(0.8, 0, 0.35), CurveSpec::circle(0, 0, 1)), GeometryError);
  EXPECT_THROW(require_nested(CurveSpec::circle(5, 0, 0.35), CurveSpec::circle(0, 0, 1)), GeometryError);
  EXPECT_NEAR(curve_separation(CurveSpec::circle(0, 0, 0.35), CurveSpec::circle(0, 0, 1)), 0.65, 1e-6);
}
