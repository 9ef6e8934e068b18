#include "heatfm/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "heatfm/error.hpp"
#include "heatfm/kernels.hpp"

namespace heatfm {
namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kMinReciprocalCondition = 1e-13;

// Lag-0 single-layer weight of a node with local spacing h: the exact
// integral of the time-integrated kernel over a straight line through the
// node minus the trapezoid contributions of its neighbours on that line.
double single_layer_self_weight(double h, double b) {
  double tail = 0.0;
  for (int m = 1; m < 10000; ++m) {
    const double x = (m * h) * (m * h) / (4.0 * b);
    const double e = kernels::expint_e1(x);
    tail += e;
    if (e <= 1e-18 * tail) break;
  }
  return std::sqrt(b / std::numbers::pi) - 2.0 * h * tail / kFourPi;
}

void require_disjoint(const StackedNodes& sources, const BoundaryCurve& target) {
  for (const Vec2& x : target.nodes) {
    for (const Vec2& y : sources.nodes) {
      if ((x - y).norm() <= kGeometryTolerance) {
        throw GeometryError("target curve touches a source curve");
      }
    }
  }
}

}  // namespace

TimeGrid::TimeGrid(double final_time, int steps) : T(final_time), Nt(steps) {
  if (!(final_time > 0.0) || !std::isfinite(final_time)) throw Error("final time must be positive");
  if (steps < 4) throw Error("time grid needs at least 4 steps");
}

double TimeGrid::lag_begin(int lag) const { return std::max(0.0, (lag - 0.5) * dt()); }

Eigen::VectorXd BoundaryField::flatten() const {
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

BoundaryField BoundaryField::unflatten(const Eigen::VectorXd& v, int nodes, int cells) {
  if (v.size() != static_cast<Eigen::Index>(nodes) * cells) throw Error("field size mismatch");
  return BoundaryField(Eigen::Map<const Eigen::MatrixXd>(v.data(), nodes, cells));
}

CellSeries to_series(const BoundaryField& f) {
  CellSeries s(static_cast<std::size_t>(f.cells()));
  for (int k = 0; k < f.cells(); ++k) s[static_cast<std::size_t>(k)] = f.values.col(k);
  return s;
}

BoundaryField column_of(const CellSeries& s, int column) {
  BoundaryField f(static_cast<int>(s.front().rows()), static_cast<int>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) f.values.col(static_cast<Eigen::Index>(k)) = s[k].col(column);
  return f;
}

StackedNodes StackedNodes::from(const std::vector<const BoundaryCurve*>& curves) {
  StackedNodes out;
  for (const BoundaryCurve* c : curves) {
    out.nodes.insert(out.nodes.end(), c->nodes.begin(), c->nodes.end());
    out.normals.insert(out.normals.end(), c->normals.begin(), c->normals.end());
    out.weights.insert(out.weights.end(), c->weights.begin(), c->weights.end());
    out.curvature.insert(out.curvature.end(), c->curvature.begin(), c->curvature.end());
  }
  return out;
}

RetardedBlocks assemble_blocks(const std::vector<const BoundaryCurve*>& curves, const TimeGrid& grid) {
  for (std::size_t a = 0; a < curves.size(); ++a) {
    for (std::size_t b = a + 1; b < curves.size(); ++b) {
      if (curve_separation(curves[a]->spec, curves[b]->spec) <= kGeometryTolerance) {
        throw GeometryError("boundary curves overlap");
      }
    }
  }
  const StackedNodes src = StackedNodes::from(curves);
  const int n = src.size();
  Eigen::MatrixXd r2(n, n), dot(n, n);
  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < n; ++s) {
      const Vec2 d = src.nodes[static_cast<std::size_t>(t)] - src.nodes[static_cast<std::size_t>(s)];
      r2(t, s) = d.squaredNorm();
      dot(t, s) = d.dot(src.normals[static_cast<std::size_t>(t)]);
    }
  }
  RetardedBlocks out;
  out.single_layer.resize(static_cast<std::size_t>(grid.Nt));
  out.adjoint_double_layer.resize(static_cast<std::size_t>(grid.Nt));
  for (int lag = 0; lag < grid.Nt; ++lag) {
    const double a = grid.lag_begin(lag), b = grid.lag_end(lag);
    Eigen::MatrixXd v(n, n), k(n, n);
    for (int s = 0; s < n; ++s) {
      const double w = src.weights[static_cast<std::size_t>(s)];
      for (int t = 0; t < n; ++t) {
        if (t == s) continue;
        v(t, s) = kernels::gamma_time_integral(r2(t, s), a, b) * w;
        k(t, s) = kernels::dnu_gamma_time_integral(r2(t, s), dot(t, s), a, b) * w;
      }
      if (lag == 0) {
        v(s, s) = single_layer_self_weight(w, b);
        k(s, s) = -src.curvature[static_cast<std::size_t>(s)] * w / kFourPi;
      } else {
        v(s, s) = std::log(b / a) / kFourPi * w;
        k(s, s) = 0.0;
      }
    }
    out.single_layer[static_cast<std::size_t>(lag)] = std::move(v);
    out.adjoint_double_layer[static_cast<std::size_t>(lag)] = std::move(k);
  }
  return out;
}

RetardedBlocks assemble_cross_blocks(const StackedNodes& sources, const BoundaryCurve& target,
                                     const TimeGrid& grid) {
  require_disjoint(sources, target);
  const int nt = target.size(), ns = sources.size();
  RetardedBlocks out;
  out.single_layer.resize(static_cast<std::size_t>(grid.Nt));
  out.adjoint_double_layer.resize(static_cast<std::size_t>(grid.Nt));
  for (int lag = 0; lag < grid.Nt; ++lag) {
    const double a = grid.lag_begin(lag), b = grid.lag_end(lag);
    Eigen::MatrixXd v(nt, ns), k(nt, ns);
    for (int s = 0; s < ns; ++s) {
      const double w = sources.weights[static_cast<std::size_t>(s)];
      for (int t = 0; t < nt; ++t) {
        const Vec2 d = target.nodes[static_cast<std::size_t>(t)] - sources.nodes[static_cast<std::size_t>(s)];
        const double r2 = d.squaredNorm();
        v(t, s) = kernels::gamma_time_integral(r2, a, b) * w;
        k(t, s) = kernels::dnu_gamma_time_integral(r2, d.dot(target.normals[static_cast<std::size_t>(t)]), a, b) * w;
      }
    }
    out.single_layer[static_cast<std::size_t>(lag)] = std::move(v);
    out.adjoint_double_layer[static_cast<std::size_t>(lag)] = std::move(k);
  }
  return out;
}

NeumannSolver::NeumannSolver(std::vector<Component> components, const TimeGrid& grid, SolverOptions options)
    : components_(std::move(components)), grid_(grid) {
  if (components_.empty()) throw Error("solver needs at least one boundary component");
  std::vector<const BoundaryCurve*> curves;
  int offset = 0;
  for (const Component& c : components_) {
    curves.push_back(&c.curve);
    offsets_.push_back(offset);
    offset += c.curve.size();
  }
  for (std::size_t i = 1; i < components_.size(); ++i) {
    require_nested(components_[i].curve.spec, components_[0].curve.spec);
  }
  sources_ = StackedNodes::from(curves);
  blocks_ = assemble_blocks(curves, grid_);

  Eigen::MatrixXd a0 = blocks_.adjoint_double_layer[0];
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const double sigma = components_[c].side == Side::inside ? 1.0 : -1.0;
    for (int i = 0; i < components_[c].curve.size(); ++i) {
      a0(offsets_[c] + i, offsets_[c] + i) += sigma * options.jump;
    }
  }
  lu_.compute(a0);
  rcond_ = lu_.rcond();
  if (!(rcond_ > kMinReciprocalCondition)) {
    throw NumericalError("singular stepping matrix (reciprocal condition " + std::to_string(rcond_) + ")");
  }
}

CellSeries NeumannSolver::solve(const CellSeries& flux) const {
  if (static_cast<int>(flux.size()) != grid_.Nt) throw Error("flux has wrong number of time cells");
  CellSeries density(flux.size());
  for (int k = 0; k < grid_.Nt; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (flux[uk].rows() != size()) throw Error("flux has wrong number of nodes");
    Eigen::MatrixXd rhs = flux[uk];
    for (int lag = 1; lag <= k; ++lag) {
      rhs.noalias() -= blocks_.adjoint_double_layer[static_cast<std::size_t>(lag)] * density[uk - static_cast<std::size_t>(lag)];
    }
    density[uk] = lu_.solve(rhs);
  }
  return density;
}

BoundaryField NeumannSolver::solve(const BoundaryField& flux) const {
  return column_of(solve(to_series(flux)), 0);
}

CellSeries NeumannSolver::convolve(const std::vector<Eigen::MatrixXd>& lags, const CellSeries& density) {
  CellSeries out(density.size());
  for (std::size_t k = 0; k < density.size(); ++k) {
    Eigen::MatrixXd acc = lags[0] * density[k];
    for (std::size_t lag = 1; lag <= k; ++lag) acc.noalias() += lags[lag] * density[k - lag];
    out[k] = std::move(acc);
  }
  return out;
}

CellSeries NeumannSolver::trace(const CellSeries& density) const {
  return convolve(blocks_.single_layer, density);
}

RetardedBlocks NeumannSolver::cross_blocks(const BoundaryCurve& target) const {
  return assemble_cross_blocks(sources_, target, grid_);
}

CellSeries NeumannSolver::trace_on(const CellSeries& density, const BoundaryCurve& target) const {
  return convolve(cross_blocks(target).single_layer, density);
}

CellSeries NeumannSolver::normal_derivative_on(const CellSeries& density, const BoundaryCurve& target) const {
  return convolve(cross_blocks(target).adjoint_double_layer, density);
}

Eigen::RowVectorXd NeumannSolver::potential_row(const Vec2& x, double t) const {
  const double dt = grid_.dt();
  const int n = size();
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(n) * grid_.Nt);
  for (int j = 0; j < grid_.Nt && j * dt < t; ++j) {
    const double a = std::max(0.0, t - (j + 1) * dt), b = t - j * dt;
    for (int s = 0; s < n; ++s) {
      const auto us = static_cast<std::size_t>(s);
      const double r2 = (x - sources_.nodes[us]).squaredNorm();
      if (r2 == 0.0) throw GeometryError("evaluation point coincides with a boundary node");
      row(j * n + s) = sources_.weights[us] * kernels::gamma_time_integral(r2, a, b);
    }
  }
  return row;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> NeumannSolver::gradient_rows(const Vec2& x, double t) const {
  const double dt = grid_.dt();
  const int n = size();
  Eigen::Matrix<double, 2, Eigen::Dynamic> rows = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, static_cast<Eigen::Index>(n) * grid_.Nt);
  for (int j = 0; j < grid_.Nt && j * dt < t; ++j) {
    const double a = std::max(0.0, t - (j + 1) * dt), b = t - j * dt;
    for (int s = 0; s < n; ++s) {
      const auto us = static_cast<std::size_t>(s);
      const Vec2 d = x - sources_.nodes[us];
      const double r2 = d.squaredNorm();
      if (r2 == 0.0) throw GeometryError("evaluation point coincides with a boundary node");
      rows.col(j * n + s) = sources_.weights[us] * kernels::grad_gamma_time_factor(r2, a, b) * d;
    }
  }
  return rows;
}

double NeumannSolver::potential(const BoundaryField& density, const Vec2& x, double t) const {
  return potential_row(x, t).dot(density.flatten());
}

Vec2 NeumannSolver::gradient(const BoundaryField& density, const Vec2& x, double t) const {
  return gradient_rows(x, t) * density.flatten();
}

BoundaryField green_probe_trace(const NeumannSolver& omega, const Vec2& y, double s, bool include_correction) {
  if (omega.components() != 1) throw Error("probe needs a solver on Omega alone");
  const BoundaryCurve& curve = omega.curve(0);
  const TimeGrid& grid = omega.grid();
  if (!point_in_region(y, curve)) throw GeometryError("probe point outside Omega");
  if (!(s > 0.0) || s > grid.T * (1.0 + 1e-12)) throw Error("probe time must lie in (0, T]");
  const int m = static_cast<int>(std::lround(s / grid.dt()));
  if (std::abs(m * grid.dt() - s) > 1e-9 * grid.T || m < 1) throw Error("probe time must lie on the time grid");

  const int n = curve.size();
  const double dt = grid.dt();
  std::vector<double> r2(static_cast<std::size_t>(n)), dot(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Vec2 d = curve.nodes[static_cast<std::size_t>(i)] - y;
    r2[static_cast<std::size_t>(i)] = d.squaredNorm();
    dot[static_cast<std::size_t>(i)] = d.dot(curve.normals[static_cast<std::size_t>(i)]);
  }

  // Forward Green function G(x, tau; y, 0) = Gamma + c, with c the Neumann
  // solution cancelling the normal flux of Gamma, sampled at tau = s - t_k.
  BoundaryField correction(n, grid.Nt);
  if (include_correction) {
    BoundaryField flux(n, grid.Nt);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        flux.values(i, j) = -kernels::dnu_gamma_time_integral(r2[ui], dot[ui], j * dt, (j + 1) * dt) / dt;
      }
    }
    const CellSeries density = omega.solve(to_series(flux));
    correction = column_of(omega.trace(density), 0);
  }

  BoundaryField probe(n, grid.Nt);
  for (int k = 0; k < m; ++k) {
    const int j = m - 1 - k;
    const double tau = grid.midpoint(j);
    for (int i = 0; i < n; ++i) {
      probe.values(i, k) = std::exp(-r2[static_cast<std::size_t>(i)] / (4.0 * tau)) / (kFourPi * tau) +
                           correction.values(i, j);
    }
  }
  return probe;
}

}  // namespace heatfm
