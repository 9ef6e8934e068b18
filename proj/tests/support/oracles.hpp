#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

// Independent reference computations for the tests. Nothing here calls into
// the library's kernels or solvers.
namespace oracle {

/// Adaptive Gauss-Kronrod quadrature on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13);

/// Exponential integral E1 from Boost.
double expint_e1(double x);

/// int_a^b (4 pi tau)^{-1} exp(-r2 / (4 tau)) d tau by quadrature.
double gamma_time_integral(double r2, double a, double b);

/// int_a^b of the normal derivative of the heat kernel by quadrature.
double dnu_gamma_time_integral(double r2, double dot_nu, double a, double b);

/// Temperature at radius r, time t in the unit disk heated by unit flux from
/// zero initial data (Bessel series over the zeros of J1).
double disk_uniform_flux(double r, double t, int modes = 400);

/// Neumann Green function G(x, t; y, 0) of the unit disk from its
/// eigenfunction expansion over the zeros alpha < alpha_max of J_n'.
class DiskNeumannGreen {
 public:
  explicit DiskNeumannGreen(double alpha_max = 60.0);
  double operator()(const Eigen::Vector2d& x, const Eigen::Vector2d& y, double t) const;

 private:
  struct Mode {
    int n;
    double alpha;
    double norm;
  };
  std::vector<Mode> modes_;
};

/// Eigenvalues (descending) of A v = lambda v in the inner product
/// <u, v> = u^T diag(g) v, from the generalized problem (G A) v = lambda G v.
Eigen::VectorXd weighted_eigenvalues(const Eigen::MatrixXd& A, const Eigen::VectorXd& g);

}  // namespace oracle
