#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "heatfm/forward.hpp"
#include "heatfm/geometry.hpp"

namespace heatfm {

/// Outer boundary, optional cavity and their discretization.
struct ProblemSetup {
  CurveSpec omega;
  std::optional<CurveSpec> cavity;
  int m_omega = 32;
  int m_cavity = 24;
  TimeGrid grid;
  SolverOptions options;
};

/// Time-translation-invariant causal operator stored by lag: block (k, j) of
/// the dense matrix is lags[k - j] for k >= j and zero otherwise.
struct CausalOperator {
  std::vector<Eigen::MatrixXd> lags;

  int cells() const { return static_cast<int>(lags.size()); }
  int rows() const { return static_cast<int>(lags.front().rows()); }
  int cols() const { return static_cast<int>(lags.front().cols()); }

  Eigen::MatrixXd dense() const;
  BoundaryField apply(const BoundaryField& f) const;
  /// (*this) after `inner`.
  CausalOperator compose(const CausalOperator& inner) const;
  CausalOperator operator-(const CausalOperator& other) const;
  /// Frobenius norm of the dense matrix.
  double frobenius() const;
};

/// Dense operator on the space-time basis of one curve (node i, cell k),
/// k-major, with diagonal Gram weights w_i dt.
struct SpaceTimeOperator {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd gram_domain;
  Eigen::VectorXd gram_codomain;
  int nodes = 0;
  int cells = 0;
  double T = 0.0;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

/// Diagonal W-inner-product weights w_i dt tiled over cells.
Eigen::VectorXd space_time_gram(const BoundaryCurve& curve, const TimeGrid& grid);

/// <f, g>_W for two fields on the same curve.
double inner_w(const BoundaryField& f, const BoundaryField& g, const BoundaryCurve& curve, const TimeGrid& grid);

/// Forward solvers on Omega and, when a cavity is present, on Omega minus D.
class ForwardModel {
 public:
  explicit ForwardModel(const ProblemSetup& setup);

  const ProblemSetup& setup() const { return setup_; }
  const TimeGrid& grid() const { return setup_.grid; }
  bool has_cavity() const { return cavity_solver_.has_value(); }
  const NeumannSolver& omega_solver() const { return omega_solver_; }
  const NeumannSolver& cavity_solver() const;
  const BoundaryCurve& omega_curve() const { return omega_solver_.curve(0); }
  const BoundaryCurve& cavity_curve() const;

  /// Trace on dD of the cavity problem with flux phi on dOmega.
  BoundaryField apply_L(const BoundaryField& phi) const;
  /// Trace on dOmega of the cavity problem with flux theta on dD.
  BoundaryField apply_Lhat(const BoundaryField& theta) const;
  /// -R Lhat R: the backward problem mapped to a forward one by t -> T - t.
  BoundaryField apply_Lprime(const BoundaryField& theta) const;
  /// -(normal derivative on dD) of the cavity-free solution with flux phi.
  BoundaryField apply_FL(const BoundaryField& phi) const;
  /// Trace on dOmega with flux phi, with or without the cavity.
  BoundaryField apply_lambda(const BoundaryField& phi, bool with_cavity) const;

 private:
  ProblemSetup setup_;
  NeumannSolver omega_solver_;
  std::optional<NeumannSolver> cavity_solver_;
};

/// Impulse responses of every operator the factorization needs, by lag.
/// Without a cavity, lambda_d is lambda_0 and the cavity operators are empty.
struct OperatorSet {
  CausalOperator lambda_d;
  CausalOperator lambda_0;
  CausalOperator L;
  CausalOperator Lhat;
  CausalOperator FL;
};

OperatorSet assemble_operators(const ForwardModel& model);

/// Dense ND map on dOmega, from the Omega-minus-D solver when with_cavity is
/// set and a cavity exists, otherwise from the Omega solver.
SpaceTimeOperator assemble_lambda(const ForwardModel& model, bool with_cavity);
SpaceTimeOperator to_space_time(const CausalOperator& op, const BoundaryCurve& curve, const TimeGrid& grid);

/// N = R Lhat R (FL). Returns the zero operator when there is no cavity.
SpaceTimeOperator assemble_N(const ForwardModel& model, const OperatorSet& ops);

/// Sum over j >= max(a, b) of back[j - a] * front[j - b] for every block
/// (a, b). With back = Lhat this is R Lhat R front.
Eigen::MatrixXd anticausal_product(const CausalOperator& back, const CausalOperator& front);

/// Lags of -W_Omega^{-1} L^T W_D, the stand-in for Lhat given by duality.
CausalOperator lhat_from_duality(const CausalOperator& L, const BoundaryCurve& omega, const BoundaryCurve& cavity);

/// Cell k -> cell Nt-1-k.
BoundaryField time_reversal(const BoundaryField& f);
SpaceTimeOperator time_reversal(const SpaceTimeOperator& op);

/// W-adjoint G_domain^{-1} A^T G_codomain.
SpaceTimeOperator dual(const SpaceTimeOperator& op);

struct Symmetrized {
  SpaceTimeOperator ntilde;  ///< (N + N')/2
  Eigen::MatrixXd S;         ///< G^{1/2} ntilde G^{-1/2}, exactly symmetric
};
Symmetrized symmetrize(const SpaceTimeOperator& op);

struct NoiseSpec {
  double level = 0.0;
  std::uint64_t seed = 0;
};

/// Adds a Gaussian perturbation E with ||E||_F = level ||A||_F.
SpaceTimeOperator add_noise(const SpaceTimeOperator& op, const NoiseSpec& noise);

}  // namespace heatfm
