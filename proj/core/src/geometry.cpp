#include "heatfm/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "heatfm/error.hpp"

namespace heatfm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kDenseSamples = 4096;

std::size_t expected_param_count(CurveKind kind) {
  switch (kind) {
    case CurveKind::circle: return 3;
    case CurveKind::ellipse: return 4;
    case CurveKind::kite: return 3;
    case CurveKind::peanut: return 3;
  }
  return 0;
}

// Polar radius of the peanut and its first two derivatives.
struct Polar {
  double r, dr, ddr;
};

Polar peanut_radius(double scale, double tau) {
  const double c = std::cos(tau);
  const double q = 3.0 * c * c + 1.0;
  const double dq = -3.0 * std::sin(2.0 * tau);
  const double ddq = -6.0 * std::cos(2.0 * tau);
  const double sq = std::sqrt(q);
  const double h = 0.5 * scale;
  return {h * sq, h * dq / (2.0 * sq), h * (ddq / (2.0 * sq) - dq * dq / (4.0 * q * sq))};
}

}  // namespace

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::circle: return "circle";
    case CurveKind::ellipse: return "ellipse";
    case CurveKind::kite: return "kite";
    case CurveKind::peanut: return "peanut";
  }
  return "unknown";
}

CurveSpec CurveSpec::circle(double cx, double cy, double r) {
  CurveSpec s{CurveKind::circle, {cx, cy, r}};
  s.validate();
  return s;
}

CurveSpec CurveSpec::ellipse(double cx, double cy, double a, double b) {
  CurveSpec s{CurveKind::ellipse, {cx, cy, a, b}};
  s.validate();
  return s;
}

CurveSpec CurveSpec::kite(double cx, double cy, double scale) {
  CurveSpec s{CurveKind::kite, {cx, cy, scale}};
  s.validate();
  return s;
}

CurveSpec CurveSpec::peanut(double cx, double cy, double scale) {
  CurveSpec s{CurveKind::peanut, {cx, cy, scale}};
  s.validate();
  return s;
}

CurveSpec CurveSpec::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string kind;
  if (!(in >> kind)) throw GeometryError("empty curve specification");
  CurveSpec spec;
  if (kind == "circle") {
    spec.kind = CurveKind::circle;
  } else if (kind == "ellipse") {
    spec.kind = CurveKind::ellipse;
  } else if (kind == "kite") {
    spec.kind = CurveKind::kite;
  } else if (kind == "peanut") {
    spec.kind = CurveKind::peanut;
  } else {
    throw GeometryError("unknown curve kind '" + kind + "'");
  }
  std::string token;
  while (in >> token) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw GeometryError("bad curve parameter '" + token + "'");
    }
    spec.params.push_back(v);
  }
  spec.validate();
  return spec;
}

std::string CurveSpec::to_string() const {
  std::ostringstream out;
  out.precision(17);
  out << heatfm::to_string(kind);
  for (double p : params) out << ' ' << p;
  return out.str();
}

void CurveSpec::validate() const {
  const std::size_t n = expected_param_count(kind);
  if (params.size() != n) {
    throw GeometryError(std::string(heatfm::to_string(kind)) + " expects " + std::to_string(n) +
                        " parameters, got " + std::to_string(params.size()));
  }
  for (double p : params) {
    if (!std::isfinite(p)) throw GeometryError("non-finite curve parameter");
  }
  for (std::size_t i = 2; i < n; ++i) {
    if (params[i] <= 0.0) {
      throw GeometryError(std::string(heatfm::to_string(kind)) + ": radius/scale must be positive");
    }
  }
}

Vec2 CurveSpec::point(double tau) const {
  const double cx = params[0], cy = params[1];
  const double c = std::cos(tau), s = std::sin(tau);
  switch (kind) {
    case CurveKind::circle: return {cx + params[2] * c, cy + params[2] * s};
    case CurveKind::ellipse: return {cx + params[2] * c, cy + params[3] * s};
    case CurveKind::kite: {
      const double k = params[2];
      return {cx + k * (c + 0.65 * std::cos(2.0 * tau) - 0.65), cy + 1.5 * k * s};
    }
    case CurveKind::peanut: {
      const double r = peanut_radius(params[2], tau).r;
      return {cx + r * c, cy + r * s};
    }
  }
  return {cx, cy};
}

Vec2 CurveSpec::first_derivative(double tau) const {
  const double c = std::cos(tau), s = std::sin(tau);
  switch (kind) {
    case CurveKind::circle: return {-params[2] * s, params[2] * c};
    case CurveKind::ellipse: return {-params[2] * s, params[3] * c};
    case CurveKind::kite: {
      const double k = params[2];
      return {k * (-s - 1.3 * std::sin(2.0 * tau)), 1.5 * k * c};
    }
    case CurveKind::peanut: {
      const Polar p = peanut_radius(params[2], tau);
      return {p.dr * c - p.r * s, p.dr * s + p.r * c};
    }
  }
  return {0.0, 0.0};
}

Vec2 CurveSpec::second_derivative(double tau) const {
  const double c = std::cos(tau), s = std::sin(tau);
  switch (kind) {
    case CurveKind::circle: return {-params[2] * c, -params[2] * s};
    case CurveKind::ellipse: return {-params[2] * c, -params[3] * s};
    case CurveKind::kite: {
      const double k = params[2];
      return {k * (-c - 2.6 * std::cos(2.0 * tau)), -1.5 * k * s};
    }
    case CurveKind::peanut: {
      const Polar p = peanut_radius(params[2], tau);
      return {p.ddr * c - 2.0 * p.dr * s - p.r * c, p.ddr * s + 2.0 * p.dr * c - p.r * s};
    }
  }
  return {0.0, 0.0};
}

double BoundaryCurve::perimeter() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

BoundaryCurve make_curve(const CurveSpec& spec, int nodes) {
  spec.validate();
  if (nodes < 3) throw GeometryError("a curve needs at least 3 nodes");
  BoundaryCurve curve;
  curve.spec = spec;
  const auto m = static_cast<std::size_t>(nodes);
  curve.params.resize(m);
  curve.nodes.resize(m);
  curve.normals.resize(m);
  curve.weights.resize(m);
  curve.curvature.resize(m);
  const double h = kTwoPi / nodes;
  for (std::size_t i = 0; i < m; ++i) {
    const double tau = h * static_cast<double>(i);
    const Vec2 d1 = spec.first_derivative(tau);
    const Vec2 d2 = spec.second_derivative(tau);
    const double speed = d1.norm();
    curve.params[i] = tau;
    curve.nodes[i] = spec.point(tau);
    curve.normals[i] = Vec2(d1.y(), -d1.x()) / speed;
    curve.weights[i] = h * speed;
    curve.curvature[i] = (d1.x() * d2.y() - d1.y() * d2.x()) / (speed * speed * speed);
  }
  return curve;
}

ClosestPoint closest_point(const Vec2& y, const CurveSpec& spec) {
  const double h = kTwoPi / kDenseSamples;
  double best_tau = 0.0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kDenseSamples; ++i) {
    const double tau = h * i;
    const double d2 = (spec.point(tau) - y).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_tau = tau;
    }
  }
  // Golden-section refinement inside the neighbouring sample interval.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_tau - h, hi = best_tau + h;
  auto f = [&](double t) { return (spec.point(t) - y).squaredNorm(); };
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    }
  }
  double tau = 0.5 * (lo + hi);
  double d2 = f(tau);
  if (best_d2 < d2) {
    tau = best_tau;
    d2 = best_d2;
  }
  return {std::sqrt(d2), tau};
}

int winding_number(const Vec2& y, const CurveSpec& spec) {
  const double h = kTwoPi / kDenseSamples;
  double total = 0.0;
  Vec2 prev = spec.point(0.0) - y;
  for (int i = 1; i <= kDenseSamples; ++i) {
    const Vec2 cur = spec.point(h * (i % kDenseSamples)) - y;
    total += std::atan2(prev.x() * cur.y() - prev.y() * cur.x(), prev.dot(cur));
    prev = cur;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

bool point_in_region(const Vec2& y, const CurveSpec& spec) {
  const ClosestPoint cp = closest_point(y, spec);
  if (cp.distance < kGeometryTolerance) throw GeometryError("on-boundary point");
  // The dense polygon is only trusted well away from the curve; closer in,
  // the side is read off the outward normal at the closest point.
  const double chord_error = 1e-3 * (spec.point(0.0) - spec.center()).norm();
  if (cp.distance > chord_error) return winding_number(y, spec) == 1;
  const Vec2 d1 = spec.first_derivative(cp.tau);
  const Vec2 normal(d1.y(), -d1.x());
  return (y - spec.point(cp.tau)).dot(normal) < 0.0;
}

bool point_in_region(const Vec2& y, const BoundaryCurve& curve) {
  return point_in_region(y, curve.spec);
}

double curve_separation(const CurveSpec& a, const CurveSpec& b) {
  constexpr int n = 1024;
  std::vector<Vec2> pa(n), pb(n);
  for (int i = 0; i < n; ++i) {
    pa[static_cast<std::size_t>(i)] = a.point(kTwoPi * i / n);
    pb[static_cast<std::size_t>(i)] = b.point(kTwoPi * i / n);
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (const Vec2& q : pb) {
      const double d = (pa[i] - q).squaredNorm();
      if (d < best) {
        best = d;
        bi = i;
      }
    }
  }
  // Polish against the exact second curve from the best sample of the first.
  return std::min(std::sqrt(best), closest_point(pa[bi], b).distance);
}

void require_nested(const CurveSpec& inner, const CurveSpec& outer) {
  const double sep = curve_separation(inner, outer);
  if (sep <= kGeometryTolerance) throw GeometryError("cavity touches or crosses the outer boundary");
  if (!point_in_region(inner.point(0.0), outer)) {
    throw GeometryError("cavity is not inside the outer boundary");
  }
}

}  // namespace heatfm
