#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "heatfm/forward.hpp"
#include "heatfm/geometry.hpp"

namespace heatfm {

/// Eigenpairs of the symmetrized operator in descending order. `vectors`
/// holds W-orthonormal coefficient vectors G^{-1/2} E.
struct EigenSystem {
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd gram;
  int retained = 0;
};

/// Full symmetric eigendecomposition of S with cutoff ratio tau. Throws
/// NumericalError when the largest eigenvalue is not positive.
EigenSystem eigendecompose(const Eigen::MatrixXd& S, const Eigen::VectorXd& gram, double tau);

/// Value of W standing in for +infinity.
inline constexpr double kIndicatorInfinity = std::numeric_limits<double>::infinity();

/// Inverse Picard series over the retained pairs for the W-normalized probe.
double picard_indicator(const EigenSystem& eig, const Eigen::VectorXd& probe);

/// Partial sums sigma_k = sum_{n<=k} |<p, psi_n>_W|^2 / lambda_n, k = 1..retained.
std::vector<double> picard_partial_sums(const EigenSystem& eig, const Eigen::VectorXd& probe);

struct ProbePoint {
  Vec2 y;
  double s = 0.0;
};

struct SamplingSpec {
  int nx = 21;
  int ny = 21;
  int s_slices = 1;
  /// Clearance from dOmega; a non-positive value selects two node spacings.
  double margin = 0.0;
};

/// Tensor grid over the bounding box of Omega shrunk by the margin. Points
/// closer than the margin to dOmega, or on dD, are skipped. Slice q of
/// s_slices uses s = round(q Nt / (s_slices + 1)) dt, q = 1..s_slices.
std::vector<ProbePoint> sampling_points(const BoundaryCurve& omega, const CurveSpec* cavity,
                                        const TimeGrid& grid, const SamplingSpec& spec);

struct IndicatorGrid {
  std::vector<ProbePoint> points;
  std::vector<double> values;
  std::vector<double> normalized;
  std::vector<bool> mask;
  std::vector<bool> truth;
  bool has_truth = false;
};

/// Evaluates probes and indicators over the points, normalizes by the finite
/// maximum (infinite values map to 1) and thresholds.
IndicatorGrid reconstruct(const EigenSystem& eig, const NeumannSolver& omega, const std::vector<ProbePoint>& points,
                          double threshold, const CurveSpec* cavity);

/// Recomputes normalized values and mask for a new threshold.
void apply_threshold(IndicatorGrid& grid, double threshold);

/// |a and b| / |a or b|; 1 when both are empty.
double jaccard(const std::vector<bool>& a, const std::vector<bool>& b);

}  // namespace heatfm
