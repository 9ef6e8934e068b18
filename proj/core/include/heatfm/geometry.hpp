#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace heatfm {

using Vec2 = Eigen::Vector2d;

/// Distance below which a point counts as lying on a curve.
inline constexpr double kGeometryTolerance = 1e-9;

enum class CurveKind { circle, ellipse, kite, peanut };

/// Closed-form parametrization of a smooth closed curve, oriented
/// counterclockwise for parameter tau in [0, 2*pi).
///
///   circle  : cx cy r
///   ellipse : cx cy a b
///   kite    : cx cy scale      (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)
///   peanut  : cx cy scale      radius scale/2 * sqrt(3 cos^2 t + 1)
struct CurveSpec {
  CurveKind kind = CurveKind::circle;
  std::vector<double> params;

  static CurveSpec circle(double cx, double cy, double r);
  static CurveSpec ellipse(double cx, double cy, double a, double b);
  static CurveSpec kite(double cx, double cy, double scale);
  static CurveSpec peanut(double cx, double cy, double scale);

  /// Parses "kind p0 p1 ..." and validates the result.
  static CurveSpec parse(std::string_view text);
  std::string to_string() const;

  /// Throws GeometryError when the parameters do not describe a valid curve.
  void validate() const;

  Vec2 center() const { return {params.at(0), params.at(1)}; }
  Vec2 point(double tau) const;
  Vec2 first_derivative(double tau) const;
  Vec2 second_derivative(double tau) const;
};

std::string_view to_string(CurveKind kind);

/// Nystrom discretization of a curve: nodes uniform in the parameter,
/// outward unit normals and trapezoid arclength weights.
struct BoundaryCurve {
  CurveSpec spec;
  std::vector<double> params;
  std::vector<Vec2> nodes;
  std::vector<Vec2> normals;
  std::vector<double> weights;
  std::vector<double> curvature;

  int size() const { return static_cast<int>(nodes.size()); }
  double perimeter() const;
};

BoundaryCurve make_curve(const CurveSpec& spec, int nodes);

/// Distance from y to the exact curve, with the parameter of the closest point.
struct ClosestPoint {
  double distance;
  double tau;
};
ClosestPoint closest_point(const Vec2& y, const CurveSpec& spec);

/// Winding number of the curve about y, computed on a dense polygon.
/// Only meaningful for points farther than the polygon's chord error.
int winding_number(const Vec2& y, const CurveSpec& spec);

/// Membership of y in the region enclosed by the curve. Throws GeometryError
/// ("on-boundary point") when y lies within kGeometryTolerance of the curve.
bool point_in_region(const Vec2& y, const CurveSpec& spec);
bool point_in_region(const Vec2& y, const BoundaryCurve& curve);

/// Smallest distance between two curves, estimated on dense samples.
double curve_separation(const CurveSpec& a, const CurveSpec& b);

/// Checks that `inner` lies strictly inside `outer` with positive clearance.
void require_nested(const CurveSpec& inner, const CurveSpec& outer);

}  // namespace heatfm
