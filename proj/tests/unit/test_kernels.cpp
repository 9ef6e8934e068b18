#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "heatfm/kernels.hpp"
#include "oracles.hpp"

using namespace heatfm;
namespace k = heatfm::kernels;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Gamma, CausalZero) {
  EXPECT_EQ(k::gamma(Vec2(0, 0), 1.0, Vec2(0, 0), 1.0), 0.0);
  EXPECT_EQ(k::gamma(Vec2(0, 0), 0.5, Vec2(0, 0), 1.0), 0.0);
}

TEST(Gamma, ClosedFormValues) {
  EXPECT_NEAR(k::gamma(Vec2(0, 0), 1.0, Vec2(0, 0), 0.0), 7.9577471545947668e-2, 1e-16);
  EXPECT_NEAR(k::gamma(Vec2(2, 0), 1.0, Vec2(0, 0), 0.0), std::exp(-1.0) / (4.0 * kPi), 1e-16);
  EXPECT_NEAR(k::gamma(Vec2(2, 0), 1.0, Vec2(0, 0), 0.0), 2.9276e-2, 2e-6);
}

TEST(DnuGamma, OrthogonalAndCausal) {
  EXPECT_EQ(k::dnu_gamma(Vec2(1, 0), 1.0, Vec2(0, 0), 0.0, Vec2(0, 1)), 0.0);
  EXPECT_EQ(k::dnu_gamma(Vec2(1, 0), 0.0, Vec2(0, 0), 1.0, Vec2(1, 0)), 0.0);
}

TEST(DnuGamma, ClosedFormValue) {
  const double v = k::dnu_gamma(Vec2(1, 0), 1.0, Vec2(0, 0), 0.0, Vec2(1, 0));
  EXPECT_NEAR(v, -std::exp(-0.25) / (8.0 * kPi), 1e-16);
  EXPECT_NEAR(v, -3.0988e-2, 1e-6);
}

TEST(ExpintE1, MatchesBoost) {
  for (double x : {1e-10, 1e-3, 0.1, 0.5, 0.999, 1.0, 1.001, 2.0, 7.5, 30.0, 300.0, 700.0}) {
    const double ref = oracle::expint_e1(x);
    EXPECT_NEAR(k::expint_e1(x), ref, 1e-14 * ref) << "x = " << x;
  }
  EXPECT_TRUE(std::isinf(k::expint_e1(0.0)));
  EXPECT_EQ(k::expint_e1(800.0), 0.0);
}

TEST(GammaTimeIntegral, EmptyInterval) { EXPECT_EQ(k::gamma_time_integral(1.0, 0.3, 0.3), 0.0); }

TEST(GammaTimeIntegral, MatchesQuadrature) {
  const double ref = oracle::gamma_time_integral(1.0, 0.1, 0.5);
  EXPECT_NEAR(k::gamma_time_integral(1.0, 0.1, 0.5), ref, 1e-10 * ref);
  for (double r2 : {1e-6, 1e-3, 0.01, 0.2, 3.0}) {
    for (auto [a, b] : {std::pair{0.0, 0.01}, std::pair{0.0078125, 0.0234375}, std::pair{0.05, 0.5}}) {
      const double want = oracle::gamma_time_integral(r2, a, b);
      EXPECT_NEAR(k::gamma_time_integral(r2, a, b), want, 1e-10 * want + 1e-300)
          << "r2 = " << r2 << " [" << a << ", " << b << "]";
    }
  }
}

TEST(GammaTimeIntegral, Underflow) { EXPECT_EQ(k::gamma_time_integral(1e6, 0.0, 1.0), 0.0); }

TEST(GammaTimeIntegral, CoincidentPoints) {
  EXPECT_NEAR(k::gamma_time_integral(0.0, 0.1, 0.4), std::log(4.0) / (4.0 * kPi), 1e-15);
  EXPECT_ANY_THROW(k::gamma_time_integral(0.0, 0.0, 0.4));
  EXPECT_ANY_THROW(k::gamma_time_integral(1.0, 0.5, 0.4));
}

TEST(DnuGammaTimeIntegral, TrivialZeros) {
  EXPECT_EQ(k::dnu_gamma_time_integral(1.0, 0.0, 0.0, 1.0), 0.0);
  EXPECT_EQ(k::dnu_gamma_time_integral(1.0, 1.0, 0.2, 0.2), 0.0);
}

TEST(DnuGammaTimeIntegral, ClosedFormAndQuadrature) {
  const double v = k::dnu_gamma_time_integral(1.0, 1.0, 0.0, 1.0);
  EXPECT_NEAR(v, -std::exp(-0.25) / (2.0 * kPi), 1e-15);
  EXPECT_NEAR(v, -1.2394e-1, 1e-5);
  for (double r2 : {1e-4, 0.05, 1.0, 4.0}) {
    const double want = oracle::dnu_gamma_time_integral(r2, 0.3, 0.01, 0.2);
    EXPECT_NEAR(k::dnu_gamma_time_integral(r2, 0.3, 0.01, 0.2), want, 1e-10 * std::abs(want) + 1e-300);
  }
}

TEST(GradFactor, MatchesDerivativeOfTimeIntegral) {
  const double a = 0.02, b = 0.1;
  for (double r2 : {0.01, 0.3, 2.0}) {
    const double h = 1e-6 * r2;
    const double d = (k::gamma_time_integral(r2 + h, a, b) - k::gamma_time_integral(r2 - h, a, b)) / (2.0 * h);
    EXPECT_NEAR(k::grad_gamma_time_factor(r2, a, b), 2.0 * d, 1e-6 * std::abs(2.0 * d));
  }
}
