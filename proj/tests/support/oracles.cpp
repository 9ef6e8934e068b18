#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/expint.hpp>

namespace oracle {
namespace {

constexpr double kPi = std::numbers::pi;

double bessel_j(int n, double x) { return boost::math::cyl_bessel_j(n, x); }

double bessel_j_prime(int n, double x) {
  if (n == 0) return -bessel_j(1, x);
  return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x));
}

// Positive zeros of J_n' below alpha_max, by scanning and bisection. The
// first zero exceeds n, which keeps the scan clear of underflow near 0.
std::vector<double> derivative_zeros(int n, double alpha_max) {
  std::vector<double> zeros;
  const double step = 0.05;
  double lo = std::max(1e-6, static_cast<double>(n));
  double flo = bessel_j_prime(n, lo);
  for (double hi = lo + step; hi < alpha_max; hi += step) {
    const double fhi = bessel_j_prime(n, hi);
    if ((flo < 0) != (fhi < 0)) {
      double a = lo, b = hi, fa = flo;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = bessel_j_prime(n, m);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double z = 0.5 * (a + b);
      if (z > 1e-3) zeros.push_back(z);
    }
    lo = hi;
    flo = fhi;
  }
  return zeros;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol);
}

double expint_e1(double x) { return boost::math::expint(1, x); }

double gamma_time_integral(double r2, double a, double b) {
  return integrate([r2](double tau) { return tau <= 0.0 ? 0.0 : std::exp(-r2 / (4.0 * tau)) / (4.0 * kPi * tau); },
                   a, b);
}

double dnu_gamma_time_integral(double r2, double dot_nu, double a, double b) {
  return integrate(
      [=](double tau) {
        if (tau <= 0.0) return 0.0;
        return -dot_nu / (2.0 * tau) * std::exp(-r2 / (4.0 * tau)) / (4.0 * kPi * tau);
      },
      a, b);
}

double disk_uniform_flux(double r, double t, int modes) {
  double u = 2.0 * t + 0.5 * r * r - 0.25;
  for (int m = 1; m <= modes; ++m) {
    const double a = boost::math::cyl_bessel_j_zero(1.0, m);
    u -= 2.0 * bessel_j(0, a * r) / (a * a * bessel_j(0, a)) * std::exp(-a * a * t);
  }
  return u;
}

DiskNeumannGreen::DiskNeumannGreen(double alpha_max) {
  for (int n = 0;; ++n) {
    const std::vector<double> zeros = derivative_zeros(n, alpha_max);
    if (zeros.empty()) break;
    for (double a : zeros) {
      const double jn = bessel_j(n, a);
      modes_.push_back({n, a, kPi * (1.0 - static_cast<double>(n * n) / (a * a)) * jn * jn});
    }
  }
}

double DiskNeumannGreen::operator()(const Eigen::Vector2d& x, const Eigen::Vector2d& y, double t) const {
  const double rx = x.norm(), ry = y.norm();
  const double dtheta = std::atan2(x.y(), x.x()) - std::atan2(y.y(), y.x());
  double g = 1.0 / kPi;
  for (const Mode& m : modes_) {
    const double eps = m.n == 0 ? 1.0 : 2.0;
    g += eps * bessel_j(m.n, m.alpha * rx) * bessel_j(m.n, m.alpha * ry) * std::cos(m.n * dtheta) *
         std::exp(-m.alpha * m.alpha * t) / m.norm;
  }
  return g;
}

Eigen::VectorXd weighted_eigenvalues(const Eigen::MatrixXd& A, const Eigen::VectorXd& g) {
  const Eigen::MatrixXd G = g.asDiagonal();
  Eigen::MatrixXd GA = G * A;
  GA = 0.5 * (GA + GA.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(GA, G, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

}  // namespace oracle
