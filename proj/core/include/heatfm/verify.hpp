#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "heatfm/forward.hpp"
#include "heatfm/ndmap.hpp"

namespace heatfm {

/// One record of the oracle suite.
struct CheckReport {
  std::string name;
  bool passed = false;
  /// False for report-only checks; those never fail the suite.
  bool thresholded = true;
  std::vector<std::pair<std::string, double>> measured;
  std::string note;

  void add(std::string key, double value) { measured.emplace_back(std::move(key), value); }
  double value(const std::string& key) const;
};

/// Geometry and resolutions shared by the checks. The refined level doubles
/// every count of the base level.
struct VerifySetup {
  CurveSpec omega = CurveSpec::circle(0.0, 0.0, 1.0);
  std::optional<CurveSpec> cavity = CurveSpec::circle(0.0, 0.0, 0.35);
  int m_omega = 32;
  int m_cavity = 24;
  int nt = 32;
  double T = 0.5;
  std::uint64_t seed = 1;
  SolverOptions options;

  ProblemSetup level(int refinement) const;
};

/// Uniform-flux disk trace at the cell midpoints from a radial finite-volume
/// Crank-Nicolson solve (two implicit Euler half steps damp the start-up).
/// The time step is the largest value <= dt_max dividing half a cell.
std::vector<double> radial_disk_trace(double radius, double flux, const TimeGrid& grid, double dr = 1e-3,
                                      double dt_max = 1e-4);

/// Smooth random field: low trigonometric modes in the curve parameter times
/// cos(q pi t / T), q <= 3, with standard normal coefficients.
BoundaryField smooth_random_field(const BoundaryCurve& curve, const TimeGrid& grid, std::mt19937_64& rng);

/// |<theta, L phi>_W - <phi, L' theta>_W| over the mean of the two
/// Cauchy-Schwarz bounds; 0 when the numerator vanishes.
double duality_residual(const ForwardModel& model, const BoundaryField& phi, const BoundaryField& theta);

/// -(1/2 int v(T)^2 + int int |grad v|^2) for the transmission solution with
/// jump L phi, by polar midpoint quadrature (n x n cells per subdomain).
/// Needs concentric circles; one value per column of phis.
std::vector<double> energy_quadratic_forms(const ForwardModel& model, const std::vector<BoundaryField>& phis,
                                           int cells_per_direction = 64);

CheckReport check_forward_convergence(const VerifySetup& setup);
CheckReport check_duality(const VerifySetup& setup);
CheckReport check_factorization(const VerifySetup& setup);
CheckReport check_F_sign(const VerifySetup& setup);
CheckReport check_spectrum(const VerifySetup& setup);
CheckReport check_probe_dichotomy(const VerifySetup& setup);

std::vector<CheckReport> run_all_checks(const VerifySetup& setup);

/// True iff every thresholded check passed.
bool all_passed(const std::vector<CheckReport>& reports);

}  // namespace heatfm
