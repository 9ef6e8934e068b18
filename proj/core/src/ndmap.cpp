#include "heatfm/ndmap.hpp"

#include <cmath>
#include <random>

#include "heatfm/error.hpp"
#include "heatfm/parallel.hpp"

namespace heatfm {
namespace {

// Impulses are solved in fixed column chunks so the arithmetic does not
// depend on the number of threads.
constexpr int kImpulseChunk = 8;

enum class Readout { trace, normal_derivative };

// Responses to unit fluxes in cell 0 at every node of one component. By
// time-translation invariance these are the lag blocks of the operator.
CausalOperator impulse_responses(const NeumannSolver& solver, int component, Readout readout, int row_begin,
                                 int row_count, const BoundaryCurve* target = nullptr) {
  const int n = solver.curve(component).size();
  const int first = solver.offset(component);
  const int nt = solver.grid().Nt;
  CausalOperator out;
  out.lags.assign(static_cast<std::size_t>(nt), Eigen::MatrixXd::Zero(row_count, n));
  const int chunks = (n + kImpulseChunk - 1) / kImpulseChunk;
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const int col0 = static_cast<int>(c) * kImpulseChunk;
    const int width = std::min(kImpulseChunk, n - col0);
    CellSeries flux(static_cast<std::size_t>(nt), Eigen::MatrixXd::Zero(solver.size(), width));
    for (int j = 0; j < width; ++j) flux[0](first + col0 + j, j) = 1.0;
    const CellSeries density = solver.solve(flux);
    const CellSeries response =
        readout == Readout::trace ? solver.trace(density) : solver.normal_derivative_on(density, *target);
    for (int k = 0; k < nt; ++k) {
      out.lags[static_cast<std::size_t>(k)].middleCols(col0, width) =
          response[static_cast<std::size_t>(k)].middleRows(row_begin, row_count);
    }
  });
  return out;
}

BoundaryField stacked_flux(const NeumannSolver& solver, int component, const BoundaryField& f) {
  if (f.nodes() != solver.curve(component).size() || f.cells() != solver.grid().Nt) {
    throw Error("field does not match the boundary component");
  }
  BoundaryField flux(solver.size(), solver.grid().Nt);
  flux.values.middleRows(solver.offset(component), f.nodes()) = f.values;
  return flux;
}

BoundaryField trace_rows(const NeumannSolver& solver, const BoundaryField& density, int component) {
  const BoundaryField u = column_of(solver.trace(to_series(density)), 0);
  return BoundaryField(u.values.middleRows(solver.offset(component), solver.curve(component).size()));
}

}  // namespace

Eigen::MatrixXd CausalOperator::dense() const {
  const int r = rows(), c = cols(), nt = cells();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r) * nt, static_cast<Eigen::Index>(c) * nt);
  for (int k = 0; k < nt; ++k) {
    for (int j = 0; j <= k; ++j) {
      out.block(static_cast<Eigen::Index>(k) * r, static_cast<Eigen::Index>(j) * c, r, c) =
          lags[static_cast<std::size_t>(k - j)];
    }
  }
  return out;
}

BoundaryField CausalOperator::apply(const BoundaryField& f) const {
  if (f.nodes() != cols() || f.cells() != cells()) throw Error("operator/field size mismatch");
  BoundaryField out(rows(), cells());
  for (int k = 0; k < cells(); ++k) {
    for (int j = 0; j <= k; ++j) out.values.col(k).noalias() += lags[static_cast<std::size_t>(k - j)] * f.values.col(j);
  }
  return out;
}

CausalOperator CausalOperator::compose(const CausalOperator& inner) const {
  if (cols() != inner.rows() || cells() != inner.cells()) throw Error("operator composition size mismatch");
  CausalOperator out;
  out.lags.resize(lags.size());
  for (std::size_t l = 0; l < lags.size(); ++l) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rows(), inner.cols());
    for (std::size_t j = 0; j <= l; ++j) acc.noalias() += lags[j] * inner.lags[l - j];
    out.lags[l] = std::move(acc);
  }
  return out;
}

CausalOperator CausalOperator::operator-(const CausalOperator& other) const {
  CausalOperator out = *this;
  for (std::size_t l = 0; l < lags.size(); ++l) out.lags[l] -= other.lags.at(l);
  return out;
}

double CausalOperator::frobenius() const {
  double sum = 0.0;
  for (int l = 0; l < cells(); ++l) sum += (cells() - l) * lags[static_cast<std::size_t>(l)].squaredNorm();
  return std::sqrt(sum);
}

Eigen::VectorXd space_time_gram(const BoundaryCurve& curve, const TimeGrid& grid) {
  const int m = curve.size();
  Eigen::VectorXd g(static_cast<Eigen::Index>(m) * grid.Nt);
  for (int k = 0; k < grid.Nt; ++k) {
    for (int i = 0; i < m; ++i) g(k * m + i) = curve.weights[static_cast<std::size_t>(i)] * grid.dt();
  }
  return g;
}

double inner_w(const BoundaryField& f, const BoundaryField& g, const BoundaryCurve& curve, const TimeGrid& grid) {
  const Eigen::VectorXd w = space_time_gram(curve, grid);
  return (f.flatten().array() * g.flatten().array() * w.array()).sum();
}

ForwardModel::ForwardModel(const ProblemSetup& setup)
    : setup_(setup),
      omega_solver_({Component{make_curve(setup.omega, setup.m_omega), Side::inside}}, setup.grid, setup.options) {
  if (setup.cavity) {
    require_nested(*setup.cavity, setup.omega);
    cavity_solver_.emplace(std::vector<Component>{{make_curve(setup.omega, setup.m_omega), Side::inside},
                                                  {make_curve(*setup.cavity, setup.m_cavity), Side::outside}},
                           setup.grid, setup.options);
  }
}

const NeumannSolver& ForwardModel::cavity_solver() const {
  if (!cavity_solver_) throw Error("no cavity in this geometry");
  return *cavity_solver_;
}

const BoundaryCurve& ForwardModel::cavity_curve() const { return cavity_solver().curve(1); }

BoundaryField ForwardModel::apply_L(const BoundaryField& phi) const {
  const NeumannSolver& s = cavity_solver();
  return trace_rows(s, s.solve(stacked_flux(s, 0, phi)), 1);
}

BoundaryField ForwardModel::apply_Lhat(const BoundaryField& theta) const {
  const NeumannSolver& s = cavity_solver();
  return trace_rows(s, s.solve(stacked_flux(s, 1, theta)), 0);
}

BoundaryField ForwardModel::apply_Lprime(const BoundaryField& theta) const {
  BoundaryField out = time_reversal(apply_Lhat(time_reversal(theta)));
  out.values = -out.values;
  return out;
}

BoundaryField ForwardModel::apply_FL(const BoundaryField& phi) const {
  const BoundaryCurve& target = cavity_curve();
  const BoundaryField density = omega_solver_.solve(stacked_flux(omega_solver_, 0, phi));
  BoundaryField out = column_of(omega_solver_.normal_derivative_on(to_series(density), target), 0);
  out.values = -out.values;
  return out;
}

BoundaryField ForwardModel::apply_lambda(const BoundaryField& phi, bool with_cavity) const {
  const NeumannSolver& s = with_cavity && has_cavity() ? *cavity_solver_ : omega_solver_;
  return trace_rows(s, s.solve(stacked_flux(s, 0, phi)), 0);
}

OperatorSet assemble_operators(const ForwardModel& model) {
  OperatorSet ops;
  const NeumannSolver& omega = model.omega_solver();
  const int mo = model.omega_curve().size();
  ops.lambda_0 = impulse_responses(omega, 0, Readout::trace, 0, mo);
  if (!model.has_cavity()) {
    ops.lambda_d = ops.lambda_0;
    return ops;
  }
  const NeumannSolver& cav = model.cavity_solver();
  const int md = model.cavity_curve().size();
  CausalOperator from_omega = impulse_responses(cav, 0, Readout::trace, 0, mo + md);
  ops.lambda_d.lags.resize(from_omega.lags.size());
  ops.L.lags.resize(from_omega.lags.size());
  for (std::size_t l = 0; l < from_omega.lags.size(); ++l) {
    ops.lambda_d.lags[l] = from_omega.lags[l].topRows(mo);
    ops.L.lags[l] = from_omega.lags[l].bottomRows(md);
  }
  ops.Lhat = impulse_responses(cav, 1, Readout::trace, 0, mo);
  ops.FL = impulse_responses(omega, 0, Readout::normal_derivative, 0, md, &model.cavity_curve());
  for (auto& lag : ops.FL.lags) lag = -lag;
  return ops;
}

SpaceTimeOperator to_space_time(const CausalOperator& op, const BoundaryCurve& curve, const TimeGrid& grid) {
  if (op.rows() != curve.size() || op.cols() != curve.size()) throw Error("operator is not square on the curve");
  SpaceTimeOperator out;
  out.matrix = op.dense();
  out.gram_domain = space_time_gram(curve, grid);
  out.gram_codomain = out.gram_domain;
  out.nodes = curve.size();
  out.cells = grid.Nt;
  out.T = grid.T;
  return out;
}

SpaceTimeOperator assemble_lambda(const ForwardModel& model, bool with_cavity) {
  const NeumannSolver& s = with_cavity && model.has_cavity() ? model.cavity_solver() : model.omega_solver();
  const CausalOperator op = impulse_responses(s, 0, Readout::trace, 0, model.omega_curve().size());
  return to_space_time(op, model.omega_curve(), model.grid());
}

Eigen::MatrixXd anticausal_product(const CausalOperator& back, const CausalOperator& front) {
  if (back.cols() != front.rows() || back.cells() != front.cells()) throw Error("operator composition size mismatch");
  const int nt = back.cells();
  const int r = back.rows(), c = front.cols();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(r) * nt, static_cast<Eigen::Index>(c) * nt);
  auto block = [&](int a, int b) {
    return out.block(static_cast<Eigen::Index>(a) * r, static_cast<Eigen::Index>(b) * c, r, c);
  };
  // Block (a, b) = block (a+1, b+1) + back[Nt-1-a] front[Nt-1-b]; each
  // diagonal b - a = d is filled from its far end.
  parallel_for(static_cast<std::size_t>(2 * nt - 1), [&](std::size_t task) {
    const int d = static_cast<int>(task) - (nt - 1);
    const int a_last = d >= 0 ? nt - 1 - d : nt - 1;
    for (int a = a_last; a >= 0 && a + d >= 0; --a) {
      const int b = a + d;
      Eigen::MatrixXd prod = back.lags[static_cast<std::size_t>(nt - 1 - a)] * front.lags[static_cast<std::size_t>(nt - 1 - b)];
      if (a + 1 < nt && b + 1 < nt) prod += block(a + 1, b + 1);
      block(a, b) = prod;
    }
  });
  return out;
}

CausalOperator lhat_from_duality(const CausalOperator& L, const BoundaryCurve& omega, const BoundaryCurve& cavity) {
  CausalOperator out;
  out.lags.reserve(L.lags.size());
  const Eigen::Map<const Eigen::VectorXd> wo(omega.weights.data(), omega.size());
  const Eigen::Map<const Eigen::VectorXd> wd(cavity.weights.data(), cavity.size());
  for (const Eigen::MatrixXd& lag : L.lags) {
    out.lags.push_back(-(wo.cwiseInverse().asDiagonal() * lag.transpose() * wd.asDiagonal()));
  }
  return out;
}

SpaceTimeOperator assemble_N(const ForwardModel& model, const OperatorSet& ops) {
  SpaceTimeOperator out;
  const BoundaryCurve& omega = model.omega_curve();
  out.nodes = omega.size();
  out.cells = model.grid().Nt;
  out.T = model.grid().T;
  out.gram_domain = space_time_gram(omega, model.grid());
  out.gram_codomain = out.gram_domain;
  if (!model.has_cavity()) {
    out.matrix = Eigen::MatrixXd::Zero(out.gram_domain.size(), out.gram_domain.size());
    return out;
  }
  out.matrix = anticausal_product(ops.Lhat, ops.FL);
  return out;
}

BoundaryField time_reversal(const BoundaryField& f) {
  return BoundaryField(f.values.rowwise().reverse());
}

SpaceTimeOperator time_reversal(const SpaceTimeOperator& op) {
  const int m = op.nodes, nt = op.cells;
  Eigen::VectorXi perm(static_cast<Eigen::Index>(m) * nt);
  for (int k = 0; k < nt; ++k) {
    for (int i = 0; i < m; ++i) perm(k * m + i) = (nt - 1 - k) * m + i;
  }
  const Eigen::PermutationMatrix<Eigen::Dynamic> p(perm);
  SpaceTimeOperator out = op;
  out.matrix = p * op.matrix * p.transpose();
  out.gram_domain = p * op.gram_domain;
  out.gram_codomain = p * op.gram_codomain;
  return out;
}

SpaceTimeOperator dual(const SpaceTimeOperator& op) {
  SpaceTimeOperator out = op;
  out.matrix = op.gram_domain.cwiseInverse().asDiagonal() * op.matrix.transpose() * op.gram_codomain.asDiagonal();
  std::swap(out.gram_domain, out.gram_codomain);
  return out;
}

Symmetrized symmetrize(const SpaceTimeOperator& op) {
  if (op.matrix.rows() != op.matrix.cols()) throw Error("symmetrization needs a square operator");
  Symmetrized out;
  out.ntilde = op;
  out.ntilde.matrix = 0.5 * (op.matrix + dual(op).matrix);
  const Eigen::VectorXd root = op.gram_domain.cwiseSqrt();
  const Eigen::MatrixXd x = root.asDiagonal() * out.ntilde.matrix * root.cwiseInverse().asDiagonal();
  out.S = 0.5 * (x + x.transpose());
  return out;
}

SpaceTimeOperator add_noise(const SpaceTimeOperator& op, const NoiseSpec& noise) {
  if (!(noise.level >= 0.0) || !(noise.level < 1.0)) throw Error("noise level must lie in [0, 1)");
  SpaceTimeOperator out = op;
  if (noise.level == 0.0) return out;
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd e(op.matrix.rows(), op.matrix.cols());
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    for (Eigen::Index i = 0; i < e.rows(); ++i) e(i, j) = normal(rng);
  }
  const double norm_e = e.norm();
  if (norm_e > 0.0) out.matrix += (noise.level * op.matrix.norm() / norm_e) * e;
  return out;
}

}  // namespace heatfm
