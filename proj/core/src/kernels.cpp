#include "heatfm/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "heatfm/error.hpp"

namespace heatfm::kernels {
namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// sum_{k>=1} (-1)^k x^k / (k k!), so that E1(x) = -gamma - ln x - series(x).
double e1_series_tail(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) <= kEps * std::abs(sum)) break;
  }
  return sum;
}

// Modified Lentz evaluation of the continued fraction for exp(x) E1(x).
double e1_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  return h * std::exp(-x);
}

// exp(-r2/4b) - exp(-r2/4a), with exp(-inf) = 0 at a = 0.
double exp_difference(double r2, double a, double b) {
  const double eb = -r2 / (4.0 * b);
  if (a == 0.0) return std::exp(eb);
  return -std::exp(eb) * std::expm1(-r2 / (4.0 * a) - eb);
}

void check_interval(double a, double b) {
  if (!(a >= 0.0) || !(b >= a)) throw Error("time interval requires 0 <= a <= b");
}

}  // namespace

double expint_e1(double x) {
  if (x < 0.0 || std::isnan(x)) throw Error("expint_e1 requires x >= 0");
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  if (x <= 1.0) return -kEulerGamma - std::log(x) - e1_series_tail(x);
  if (x > 740.0) return 0.0;
  return e1_continued_fraction(x);
}

double gamma(const Vec2& x, double t, const Vec2& y, double s) {
  const double dt = t - s;
  if (dt <= 0.0) return 0.0;
  return std::exp(-(x - y).squaredNorm() / (4.0 * dt)) / (kFourPi * dt);
}

double dnu_gamma(const Vec2& x, double t, const Vec2& y, double s, const Vec2& nu_x) {
  const double dt = t - s;
  if (dt <= 0.0) return 0.0;
  return -(x - y).dot(nu_x) / (2.0 * dt) * gamma(x, t, y, s);
}

double gamma_time_integral(double r2, double a, double b) {
  check_interval(a, b);
  if (a == b) return 0.0;
  const double ub = r2 / (4.0 * b);
  if (a == 0.0) {
    if (r2 == 0.0) throw Error("gamma_time_integral diverges for r2 = 0 and a = 0");
    return expint_e1(ub) / kFourPi;
  }
  const double ua = r2 / (4.0 * a);
  if (ua <= 1.0) {
    // Both arguments small: the logarithms combine into ln(b/a), which
    // stays finite as r2 -> 0.
    return (std::log(b / a) - (e1_series_tail(ub) - e1_series_tail(ua))) / kFourPi;
  }
  return (expint_e1(ub) - expint_e1(ua)) / kFourPi;
}

double dnu_gamma_time_integral(double r2, double dot_nu, double a, double b) {
  check_interval(a, b);
  if (!(r2 > 0.0)) throw Error("coincident points require self-term rule");
  if (a == b || dot_nu == 0.0) return 0.0;
  return -(dot_nu / (2.0 * std::numbers::pi * r2)) * exp_difference(r2, a, b);
}

double grad_gamma_time_factor(double r2, double a, double b) {
  check_interval(a, b);
  if (!(r2 > 0.0)) throw Error("coincident points require self-term rule");
  if (a == b) return 0.0;
  return -exp_difference(r2, a, b) / (2.0 * std::numbers::pi * r2);
}

}  // namespace heatfm::kernels
