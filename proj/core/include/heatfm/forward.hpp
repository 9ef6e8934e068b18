#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "heatfm/geometry.hpp"

namespace heatfm {

/// Uniform time grid on (0, T). Cell k is [k dt, (k+1) dt]; collocation
/// happens at the cell midpoints.
struct TimeGrid {
  double T = 0.0;
  int Nt = 0;

  TimeGrid() = default;
  TimeGrid(double final_time, int steps);

  double dt() const { return T / Nt; }
  double midpoint(int k) const { return (k + 0.5) * dt(); }
  /// Integration window [a, b] of t_k - tau for a source cell at lag l = k - j.
  double lag_begin(int lag) const;
  double lag_end(int lag) const { return (lag + 0.5) * dt(); }
};

/// Values on nodes x time cells: rows are nodes, columns are cells.
/// Flattened coefficient vectors are k-major: index = k * M + i.
struct BoundaryField {
  Eigen::MatrixXd values;

  BoundaryField() = default;
  BoundaryField(int nodes, int cells) : values(Eigen::MatrixXd::Zero(nodes, cells)) {}
  explicit BoundaryField(Eigen::MatrixXd v) : values(std::move(v)) {}

  int nodes() const { return static_cast<int>(values.rows()); }
  int cells() const { return static_cast<int>(values.cols()); }
  Eigen::VectorXd flatten() const;
  static BoundaryField unflatten(const Eigen::VectorXd& v, int nodes, int cells);
};

/// Batched space-time data: one matrix per time cell, rows are nodes and
/// columns are independent right-hand sides.
using CellSeries = std::vector<Eigen::MatrixXd>;

CellSeries to_series(const BoundaryField& f);
BoundaryField column_of(const CellSeries& s, int column);

/// Which side of a boundary component the solution region lies on.
enum class Side { inside, outside };

struct Component {
  BoundaryCurve curve;
  Side side = Side::inside;
};

/// Magnitude of the jump term in the second-kind boundary equation. The sign
/// is +1 for components enclosing the region and -1 for cavity boundaries,
/// which is what reproduces the radial oracle on the disk.
inline constexpr double kInteriorJump = 0.5;

struct SolverOptions {
  double jump = kInteriorJump;
};

/// Nodes of several curves stacked into one list.
struct StackedNodes {
  std::vector<Vec2> nodes;
  std::vector<Vec2> normals;
  std::vector<double> weights;
  std::vector<double> curvature;

  static StackedNodes from(const std::vector<const BoundaryCurve*>& curves);
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Time-integrated single-layer and adjoint double-layer matrices, one per
/// time lag. Entry (t, s) already includes the source quadrature weight.
struct RetardedBlocks {
  std::vector<Eigen::MatrixXd> single_layer;
  std::vector<Eigen::MatrixXd> adjoint_double_layer;
};

/// Blocks with sources and targets on the same stacked curves. Coincident
/// node pairs use the self-term rule; the jump term is not included.
RetardedBlocks assemble_blocks(const std::vector<const BoundaryCurve*>& curves, const TimeGrid& grid);

/// Blocks from the stacked source curves to a disjoint target curve.
RetardedBlocks assemble_cross_blocks(const StackedNodes& sources, const BoundaryCurve& target,
                                     const TimeGrid& grid);

/// Space-time boundary-element solver for the zero-initial-value Neumann
/// problem on the region bounded by the given components. The solution is the
/// single-layer potential of the returned density.
class NeumannSolver {
 public:
  NeumannSolver(std::vector<Component> components, const TimeGrid& grid, SolverOptions options = {});

  const TimeGrid& grid() const { return grid_; }
  int size() const { return sources_.size(); }
  int components() const { return static_cast<int>(components_.size()); }
  int offset(int component) const { return offsets_.at(static_cast<std::size_t>(component)); }
  const BoundaryCurve& curve(int component) const {
    return components_.at(static_cast<std::size_t>(component)).curve;
  }
  const StackedNodes& sources() const { return sources_; }
  const RetardedBlocks& blocks() const { return blocks_; }
  double reciprocal_condition() const { return rcond_; }

  /// Flux rows follow the stacked node order. Returns the density.
  CellSeries solve(const CellSeries& flux) const;
  BoundaryField solve(const BoundaryField& flux) const;

  /// Dirichlet trace on the stacked source nodes.
  CellSeries trace(const CellSeries& density) const;
  /// Trace on a curve disjoint from every source curve.
  CellSeries trace_on(const CellSeries& density, const BoundaryCurve& target) const;
  /// Normal derivative on a curve disjoint from every source curve.
  CellSeries normal_derivative_on(const CellSeries& density, const BoundaryCurve& target) const;

  /// Potential and gradient of one density column at an off-boundary point
  /// and arbitrary time t in (0, T].
  double potential(const BoundaryField& density, const Vec2& x, double t) const;
  Vec2 gradient(const BoundaryField& density, const Vec2& x, double t) const;

  /// Coefficients of the same evaluations against a flattened density.
  Eigen::RowVectorXd potential_row(const Vec2& x, double t) const;
  Eigen::Matrix<double, 2, Eigen::Dynamic> gradient_rows(const Vec2& x, double t) const;

 private:
  RetardedBlocks cross_blocks(const BoundaryCurve& target) const;
  static CellSeries convolve(const std::vector<Eigen::MatrixXd>& lags, const CellSeries& density);

  std::vector<Component> components_;
  std::vector<int> offsets_;
  TimeGrid grid_;
  StackedNodes sources_;
  RetardedBlocks blocks_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double rcond_ = 0.0;
};

/// Boundary trace of the backward Neumann Green function of Omega with
/// singularity at (y, s), s = m dt on the grid. `omega` must be a solver for
/// the region inside a single curve. The free-space part alone is returned
/// when include_correction is false.
BoundaryField green_probe_trace(const NeumannSolver& omega, const Vec2& y, double s,
                                bool include_correction = true);

}  // namespace heatfm
