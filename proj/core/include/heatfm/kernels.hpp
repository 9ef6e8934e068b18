#pragma once

#include "heatfm/geometry.hpp"

// Heat kernel of the two-dimensional heat operator with unit conductivity,
// its normal derivative, and closed-form integrals of both over time
// intervals. Every kernel vanishes identically for t <= s.
namespace heatfm::kernels {

/// Exponential integral E1(x) for x >= 0. E1(0) = +inf; underflows to 0.
double expint_e1(double x);

/// Fundamental solution (4 pi (t-s))^{-1} exp(-|x-y|^2 / (4 (t-s))).
double gamma(const Vec2& x, double t, const Vec2& y, double s);

/// Derivative of gamma in x along nu_x.
double dnu_gamma(const Vec2& x, double t, const Vec2& y, double s, const Vec2& nu_x);

/// Integral of (4 pi tau)^{-1} exp(-r2 / (4 tau)) over tau in [a, b].
/// Requires 0 <= a <= b; r2 = 0 needs a > 0 and gives ln(b/a) / (4 pi).
double gamma_time_integral(double r2, double a, double b);

/// Integral over tau in [a, b] of the normal derivative of gamma, where
/// dot_nu = (x - y) . nu_x. Requires 0 <= a <= b and r2 > 0.
double dnu_gamma_time_integral(double r2, double dot_nu, double a, double b);

/// Factor g with grad_x of the time-integrated kernel equal to g * (x - y).
double grad_gamma_time_factor(double r2, double a, double b);

}  // namespace heatfm::kernels
