#include <cmath>

#include <gtest/gtest.h>

#include "heatfm/error.hpp"
#include "heatfm/forward.hpp"
#include "heatfm/recon.hpp"

using namespace heatfm;

TEST(Eigendecompose, Identity) {
  const EigenSystem e = eigendecompose(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2), 1e-8);
  EXPECT_DOUBLE_EQ(e.lambdas(0), 1.0);
  EXPECT_DOUBLE_EQ(e.lambdas(1), 1.0);
  EXPECT_EQ(e.retained, 2);
}

TEST(Eigendecompose, CutoffRatio) {
  const Eigen::MatrixXd S = Eigen::Vector2d(3.0, 1.0).asDiagonal();
  const EigenSystem e = eigendecompose(S, Eigen::VectorXd::Ones(2), 0.5);
  EXPECT_EQ(e.retained, 1);
  EXPECT_DOUBLE_EQ(e.lambdas(0), 3.0);
  EXPECT_EQ(eigendecompose(S, Eigen::VectorXd::Ones(2), 0.3).retained, 2);
}

TEST(Eigendecompose, ReconstructionResidual) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(30, 30);
  const Eigen::MatrixXd S = a * a.transpose();
  const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(30, 0.1, 3.0);
  const EigenSystem e = eigendecompose(S, g, 1e-8);
  // vectors are G^{-1/2} E, so E = G^{1/2} vectors.
  const Eigen::MatrixXd E = g.cwiseSqrt().asDiagonal() * e.vectors;
  EXPECT_LE((S - E * e.lambdas.asDiagonal() * E.transpose()).norm(), 1e-12 * S.norm());
  // W-orthonormality.
  const Eigen::MatrixXd gram = e.vectors.transpose() * g.asDiagonal() * e.vectors;
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(30, 30)).norm(), 1e-12);
  for (int i = 1; i < 30; ++i) EXPECT_GE(e.lambdas(i - 1), e.lambdas(i));
}

TEST(Eigendecompose, NonPositiveOperatorIsAnError) {
  try {
    eigendecompose(Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Ones(3), 1e-8);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("operator not positive"), std::string::npos);
  }
  EXPECT_THROW(eigendecompose(-Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3), 1e-8), NumericalError);
}

TEST(Eigendecompose, RejectsAsymmetricInput) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(3, 3);
  S(0, 1) = 0.5;
  EXPECT_THROW(eigendecompose(S, Eigen::VectorXd::Ones(3), 1e-8), NumericalError);
}

TEST(Picard, SinglePairProbeIsOne) {
  const Eigen::VectorXd g(Eigen::Vector3d(0.5, 1.0, 2.0));
  const Eigen::MatrixXd S = Eigen::Vector3d(1.0, 1e-3, 1e-4).asDiagonal();
  const EigenSystem e = eigendecompose(S, g, 0.5);
  ASSERT_EQ(e.retained, 1);
  EXPECT_NEAR(picard_indicator(e, e.vectors.col(0)), 1.0, 1e-14);
  EXPECT_NEAR(picard_indicator(e, 7.0 * e.vectors.col(0)), 1.0, 1e-14);
}

TEST(Picard, OrthogonalProbeIsInfinite) {
  const Eigen::MatrixXd S = Eigen::Vector3d(1.0, 1e-3, 1e-4).asDiagonal();
  const EigenSystem e = eigendecompose(S, Eigen::VectorXd::Ones(3), 0.5);
  EXPECT_EQ(picard_indicator(e, e.vectors.col(2)), kIndicatorInfinity);
  EXPECT_EQ(picard_indicator(e, Eigen::VectorXd::Zero(3)), kIndicatorInfinity);
}

TEST(Picard, PartialSumsAreMonotoneAndEndAtReciprocal) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(12, 12);
  const EigenSystem e = eigendecompose(a * a.transpose(), Eigen::VectorXd::Ones(12), 1e-6);
  const Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(12, -1.0, 2.0);
  const std::vector<double> s = picard_partial_sums(e, p);
  ASSERT_EQ(static_cast<int>(s.size()), e.retained);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i], s[i - 1]);
  EXPECT_NEAR(1.0 / s.back(), picard_indicator(e, p), 1e-12 * picard_indicator(e, p));
}

TEST(Sampling, GridRespectsMarginAndTimeSlices) {
  const TimeGrid grid(0.5, 32);
  const BoundaryCurve omega = make_curve(CurveSpec::circle(0, 0, 1), 32);
  SamplingSpec spec;
  spec.s_slices = 3;
  const std::vector<ProbePoint> pts = sampling_points(omega, nullptr, grid, spec);
  const double margin = 2.0 * omega.perimeter() / 32;
  for (const ProbePoint& p : pts) {
    EXPECT_GE(1.0 - p.y.norm(), margin * (1.0 - 1e-9));
    const double m = p.s / grid.dt();
    EXPECT_NEAR(m, std::round(m), 1e-9);
  }
  EXPECT_DOUBLE_EQ(pts.front().s, 8 * grid.dt());
  EXPECT_DOUBLE_EQ(pts.back().s, 24 * grid.dt());
  spec.s_slices = 1;
  EXPECT_DOUBLE_EQ(sampling_points(omega, nullptr, grid, spec).front().s, 0.25);
}

TEST(Sampling, ExcessiveMarginIsAnError) {
  const BoundaryCurve omega = make_curve(CurveSpec::circle(0, 0, 1), 32);
  SamplingSpec spec;
  spec.margin = 1.5;
  EXPECT_ANY_THROW(sampling_points(omega, nullptr, TimeGrid(0.5, 32), spec));
}

TEST(Reconstruct, IdenticalProbesGiveFullMask) {
  const TimeGrid grid(0.5, 8);
  const NeumannSolver omega({Component{make_curve(CurveSpec::circle(0, 0, 1), 8), Side::inside}}, grid);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(64, 64);
  const EigenSystem e = eigendecompose(a * a.transpose(), Eigen::VectorXd::Constant(64, 0.1), 1e-6);
  const std::vector<ProbePoint> pts(5, ProbePoint{Vec2(0.1, 0.2), 0.25});
  const IndicatorGrid r = reconstruct(e, omega, pts, 1.0, nullptr);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(r.values[i], r.values[0]);
    EXPECT_TRUE(r.mask[i]);
  }
  EXPECT_FALSE(r.has_truth);
}

TEST(Reconstruct, ZeroThresholdMasksEverything) {
  IndicatorGrid g;
  g.values = {0.0, 1e-9, 3.0, kIndicatorInfinity};
  apply_threshold(g, 0.0);
  for (bool m : g.mask) EXPECT_TRUE(m);
  apply_threshold(g, 0.5);
  EXPECT_FALSE(g.mask[0]);
  EXPECT_FALSE(g.mask[1]);
  EXPECT_TRUE(g.mask[2]);
  EXPECT_TRUE(g.mask[3]);
  EXPECT_DOUBLE_EQ(g.normalized[3], 1.0);
}

TEST(Jaccard, Basics) {
  EXPECT_DOUBLE_EQ(jaccard({}, {}), 1.0);
  EXPECT_DOUBLE_EQ(jaccard({false, false}, {false, false}), 1.0);
  EXPECT_DOUBLE_EQ(jaccard({true, true, false}, {true, false, true}), 1.0 / 3.0);
  EXPECT_ANY_THROW(jaccard({true}, {true, false}));
}
