#include "heatfm/recon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "heatfm/error.hpp"
#include "heatfm/parallel.hpp"

namespace heatfm {
namespace {

constexpr double kSeriesFloor = 1e-300;

// Coefficients <p, psi_n>_W of the W-normalized probe for the retained pairs.
Eigen::VectorXd probe_coefficients(const EigenSystem& eig, const Eigen::VectorXd& probe) {
  if (probe.size() != eig.gram.size()) throw Error("probe does not match the operator basis");
  const Eigen::VectorXd weighted = probe.cwiseProduct(eig.gram);
  const double norm = std::sqrt(probe.dot(weighted));
  if (!(norm > 0.0)) return Eigen::VectorXd::Zero(eig.retained);
  return eig.vectors.leftCols(eig.retained).transpose() * weighted / norm;
}

}  // namespace

EigenSystem eigendecompose(const Eigen::MatrixXd& S, const Eigen::VectorXd& gram, double tau) {
  if (S.rows() != S.cols() || S.rows() != gram.size()) throw Error("eigendecompose: size mismatch");
  if (!(tau > 0.0 && tau < 1.0)) throw Error("cutoff ratio must lie in (0, 1)");
  const double asym = (S - S.transpose()).norm();
  if (asym > 1e-10 * std::max(S.norm(), 1e-300)) throw NumericalError("matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  const Eigen::Index n = S.rows();
  EigenSystem out;
  out.lambdas = solver.eigenvalues().reverse();
  out.vectors = gram.cwiseSqrt().cwiseInverse().asDiagonal() * solver.eigenvectors().rowwise().reverse();
  out.gram = gram;
  if (!(n > 0 && out.lambdas(0) > 0.0)) {
    throw NumericalError("operator not positive; check symmetrization/noise level");
  }
  const double cut = tau * out.lambdas(0);
  int kept = 0;
  while (kept < n && out.lambdas(kept) >= cut && out.lambdas(kept) > 0.0) ++kept;
  out.retained = kept;
  return out;
}

double picard_indicator(const EigenSystem& eig, const Eigen::VectorXd& probe) {
  const Eigen::VectorXd c = probe_coefficients(eig, probe);
  double sum = 0.0;
  for (int n = 0; n < eig.retained; ++n) sum += c(n) * c(n) / eig.lambdas(n);
  if (sum <= kSeriesFloor) return kIndicatorInfinity;
  return 1.0 / sum;
}

std::vector<double> picard_partial_sums(const EigenSystem& eig, const Eigen::VectorXd& probe) {
  const Eigen::VectorXd c = probe_coefficients(eig, probe);
  std::vector<double> sums(static_cast<std::size_t>(eig.retained));
  double sum = 0.0;
  for (int n = 0; n < eig.retained; ++n) {
    sum += c(n) * c(n) / eig.lambdas(n);
    sums[static_cast<std::size_t>(n)] = sum;
  }
  return sums;
}

std::vector<ProbePoint> sampling_points(const BoundaryCurve& omega, const CurveSpec* cavity, const TimeGrid& grid,
                                        const SamplingSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1 || spec.s_slices < 1) throw Error("empty sampling grid");
  const double margin = spec.margin > 0.0 ? spec.margin : 2.0 * omega.perimeter() / omega.size();
  Vec2 lo = omega.nodes.front(), hi = omega.nodes.front();
  for (double tau = 0.0; tau < 2.0 * std::numbers::pi; tau += 2.0 * std::numbers::pi / 2048) {
    const Vec2 p = omega.spec.point(tau);
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo.array() += margin;
  hi.array() -= margin;
  if (!(lo.x() <= hi.x() && lo.y() <= hi.y())) throw Error("sampling margin leaves no room inside Omega");

  std::vector<ProbePoint> points;
  for (int q = 1; q <= spec.s_slices; ++q) {
    const int m = std::clamp(static_cast<int>(std::lround(static_cast<double>(q) * grid.Nt / (spec.s_slices + 1))), 1,
                             grid.Nt);
    const double s = m * grid.dt();
    for (int j = 0; j < spec.ny; ++j) {
      for (int i = 0; i < spec.nx; ++i) {
        const double fx = spec.nx == 1 ? 0.5 : static_cast<double>(i) / (spec.nx - 1);
        const double fy = spec.ny == 1 ? 0.5 : static_cast<double>(j) / (spec.ny - 1);
        const Vec2 y(lo.x() + fx * (hi.x() - lo.x()), lo.y() + fy * (hi.y() - lo.y()));
        const ClosestPoint cp = closest_point(y, omega.spec);
        if (cp.distance < margin * (1.0 - 1e-12) || !point_in_region(y, omega.spec)) continue;
        if (cavity && closest_point(y, *cavity).distance < kGeometryTolerance) continue;
        points.push_back({y, s});
      }
    }
  }
  if (points.empty()) throw Error("empty sampling grid");
  return points;
}

IndicatorGrid reconstruct(const EigenSystem& eig, const NeumannSolver& omega, const std::vector<ProbePoint>& points,
                          double threshold, const CurveSpec* cavity) {
  if (points.empty()) throw Error("empty sampling grid");
  if (eig.retained < 1) throw NumericalError("no retained eigenpairs");
  IndicatorGrid out;
  out.points = points;
  out.values.assign(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t i) {
    const BoundaryField probe = green_probe_trace(omega, points[i].y, points[i].s);
    out.values[i] = picard_indicator(eig, probe.flatten());
  });
  if (cavity) {
    out.has_truth = true;
    out.truth.reserve(points.size());
    for (const ProbePoint& p : points) out.truth.push_back(point_in_region(p.y, *cavity));
  }
  apply_threshold(out, threshold);
  return out;
}

void apply_threshold(IndicatorGrid& grid, double threshold) {
  double max_finite = 0.0;
  for (double v : grid.values) {
    if (std::isfinite(v)) max_finite = std::max(max_finite, v);
  }
  grid.normalized.resize(grid.values.size());
  grid.mask.resize(grid.values.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const double v = grid.values[i];
    double n = 1.0;
    if (std::isfinite(v)) n = max_finite > 0.0 ? v / max_finite : 0.0;
    grid.normalized[i] = n;
    grid.mask[i] = n >= threshold;
  }
}

double jaccard(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw Error("jaccard: size mismatch");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace heatfm
