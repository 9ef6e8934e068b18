#include "heatfm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "heatfm/error.hpp"
#include "heatfm/parallel.hpp"
#include "heatfm/recon.hpp"

namespace heatfm {
namespace {

constexpr double kBaseTolerance = 5e-2;
constexpr double kRoundoffFloor = 1e-12;
constexpr double kSignTolerance = 1e-10;
constexpr double kEnergyTolerance = 0.1;
constexpr double kPsdTolerance = 1e-6;
constexpr double kSymmetryTolerance = 1e-12;
constexpr double kForwardTolerance = 2e-2;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double norm_w(const BoundaryField& f, const BoundaryCurve& curve, const TimeGrid& grid) {
  return std::sqrt(std::max(0.0, inner_w(f, f, curve, grid)));
}

// Decreases under refinement, or already sits at round-off on both levels.
bool refines(double base, double refined) {
  return refined < base || (base <= kRoundoffFloor && refined <= kRoundoffFloor);
}

struct Pipeline {
  ForwardModel model;
  OperatorSet ops;
  SpaceTimeOperator n;
  Symmetrized sym;

  explicit Pipeline(const ProblemSetup& setup) : model(setup), ops(assemble_operators(model)) {
    n = assemble_N(model, ops);
    sym = symmetrize(n);
  }
};

bool concentric_circles(const ProblemSetup& setup) {
  return setup.omega.kind == CurveKind::circle && setup.cavity && setup.cavity->kind == CurveKind::circle &&
         (setup.omega.center() - setup.cavity->center()).norm() < 1e-12;
}

}  // namespace

double CheckReport::value(const std::string& key) const {
  for (const auto& [k, v] : measured) {
    if (k == key) return v;
  }
  throw Error("report has no value '" + key + "'");
}

ProblemSetup VerifySetup::level(int refinement) const {
  const int f = 1 << refinement;
  ProblemSetup p;
  p.omega = omega;
  p.cavity = cavity;
  p.m_omega = m_omega * f;
  p.m_cavity = m_cavity * f;
  p.grid = TimeGrid(T, nt * f);
  p.options = options;
  return p;
}

std::vector<double> radial_disk_trace(double radius, double flux, const TimeGrid& grid, double dr_target,
                                      double dt_max) {
  const int n = std::max(8, static_cast<int>(std::lround(radius / dr_target)));
  const double dr = radius / n;
  const double half_cell = 0.5 * grid.dt();
  const int sub = std::max(1, static_cast<int>(std::ceil(half_cell / dt_max - 1e-9)));
  const double h_full = half_cell / sub;

  // Finite-volume operator: V_i du_i/dt = F_{i+1/2} - F_{i-1/2}, with the
  // boundary face carrying radius * flux.
  std::vector<double> vol(static_cast<std::size_t>(n)), face(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    vol[static_cast<std::size_t>(i)] = (i + 0.5) * dr * dr;
    face[static_cast<std::size_t>(i)] = i + 1.0;  // r_{i+1/2} / dr
  }
  std::vector<double> u(static_cast<std::size_t>(n), 0.0);
  std::vector<double> lower(u.size()), diag(u.size()), upper(u.size()), rhs(u.size());

  auto apply_a = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      double acc = 0.0;
      if (i + 1 < n) acc += face[ui] * (x[ui + 1] - x[ui]);
      if (i > 0) acc -= face[ui - 1] * (x[ui] - x[ui - 1]);
      y[ui] = acc / vol[ui];
    }
  };
  // One theta-scheme step of size h with the boundary flux source.
  auto step = [&](double theta, double h) {
    std::vector<double> au(u.size());
    apply_a(u, au);
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      rhs[ui] = u[ui] + (1.0 - theta) * h * au[ui];
      const double left = i > 0 ? face[ui - 1] / vol[ui] : 0.0;
      const double right = i + 1 < n ? face[ui] / vol[ui] : 0.0;
      lower[ui] = -theta * h * left;
      upper[ui] = -theta * h * right;
      diag[ui] = 1.0 + theta * h * (left + right);
    }
    rhs[u.size() - 1] += h * radius * flux / vol[u.size() - 1];
    for (std::size_t i = 1; i < u.size(); ++i) {
      const double m = lower[i] / diag[i - 1];
      diag[i] -= m * upper[i - 1];
      rhs[i] -= m * rhs[i - 1];
    }
    u.back() = rhs.back() / diag.back();
    for (std::size_t i = u.size() - 1; i-- > 0;) u[i] = (rhs[i] - upper[i] * u[i + 1]) / diag[i];
  };

  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(grid.Nt));
  int steps_done = 0;
  for (int k = 0; k < grid.Nt; ++k) {
    const int target = (2 * k + 1) * sub;
    while (steps_done < target) {
      if (steps_done < 2) {
        step(1.0, 0.5 * h_full);
        step(1.0, 0.5 * h_full);
      } else {
        step(0.5, h_full);
      }
      ++steps_done;
    }
    trace.push_back(u.back() + 0.5 * dr * flux);
    while (steps_done < target + sub) {
      step(0.5, h_full);
      ++steps_done;
    }
  }
  return trace;
}

BoundaryField smooth_random_field(const BoundaryCurve& curve, const TimeGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kSpaceModes = 3, kTimeModes = 3;
  BoundaryField f(curve.size(), grid.Nt);
  for (int n = 0; n <= kSpaceModes; ++n) {
    for (int q = 0; q <= kTimeModes; ++q) {
      const double ac = normal(rng);
      const double as = n == 0 ? 0.0 : normal(rng);
      for (int k = 0; k < grid.Nt; ++k) {
        const double time = std::cos(q * std::numbers::pi * grid.midpoint(k) / grid.T);
        for (int i = 0; i < curve.size(); ++i) {
          const double tau = curve.params[static_cast<std::size_t>(i)];
          f.values(i, k) += (ac * std::cos(n * tau) + as * std::sin(n * tau)) * time;
        }
      }
    }
  }
  return f;
}

double duality_residual(const ForwardModel& model, const BoundaryField& phi, const BoundaryField& theta) {
  const TimeGrid& grid = model.grid();
  const BoundaryField lphi = model.apply_L(phi);
  const BoundaryField ltheta = model.apply_Lprime(theta);
  const double lhs = inner_w(theta, lphi, model.cavity_curve(), grid);
  const double rhs = inner_w(phi, ltheta, model.omega_curve(), grid);
  const double num = std::abs(lhs - rhs);
  if (num == 0.0) return 0.0;
  const double scale = 0.5 * (norm_w(theta, model.cavity_curve(), grid) * norm_w(lphi, model.cavity_curve(), grid) +
                              norm_w(phi, model.omega_curve(), grid) * norm_w(ltheta, model.omega_curve(), grid));
  return num / scale;
}

std::vector<double> energy_quadratic_forms(const ForwardModel& model, const std::vector<BoundaryField>& phis,
                                           int cells) {
  if (!concentric_circles(model.setup())) throw Error("energy identity needs concentric circles");
  if (phis.empty()) return {};
  const NeumannSolver& omega = model.omega_solver();
  const NeumannSolver& cav = model.cavity_solver();
  const TimeGrid& grid = model.grid();
  const int nphi = static_cast<int>(phis.size());
  const int mo = model.omega_curve().size();

  Eigen::MatrixXd du(static_cast<Eigen::Index>(mo) * grid.Nt, nphi);
  Eigen::MatrixXd dw(static_cast<Eigen::Index>(cav.size()) * grid.Nt, nphi);
  for (int j = 0; j < nphi; ++j) {
    const BoundaryField& phi = phis[static_cast<std::size_t>(j)];
    du.col(j) = omega.solve(phi).flatten();
    BoundaryField flux(cav.size(), grid.Nt);
    flux.values.topRows(mo) = phi.values;
    dw.col(j) = cav.solve(flux).flatten();
  }

  const Vec2 c = model.setup().omega.center();
  const double big = model.setup().omega.params[2];
  const double small = model.setup().cavity->params[2];
  struct Node {
    Vec2 x;
    double area;
    bool in_cavity;
  };
  std::vector<Node> nodes;
  const double dtheta = 2.0 * std::numbers::pi / cells;
  for (int sub = 0; sub < 2; ++sub) {
    const double r0 = sub == 0 ? 0.0 : small, r1 = sub == 0 ? small : big;
    const double drad = (r1 - r0) / cells;
    for (int i = 0; i < cells; ++i) {
      const double r = r0 + (i + 0.5) * drad;
      for (int j = 0; j < cells; ++j) {
        const double th = (j + 0.5) * dtheta;
        nodes.push_back({c + r * Vec2(std::cos(th), std::sin(th)), r * drad * dtheta, sub == 0});
      }
    }
  }

  // Two Gauss-Legendre points per time cell.
  std::vector<std::pair<double, double>> times;
  const double g = 0.5 / std::sqrt(3.0);
  for (int k = 0; k < grid.Nt; ++k) {
    times.emplace_back((k + 0.5 - g) * grid.dt(), 0.5 * grid.dt());
    times.emplace_back((k + 0.5 + g) * grid.dt(), 0.5 * grid.dt());
  }

  Eigen::MatrixXd contrib(static_cast<Eigen::Index>(nodes.size()), nphi);
  parallel_for(nodes.size(), [&](std::size_t p) {
    const Node& node = nodes[p];
    auto value = [&](double t) -> Eigen::RowVectorXd {
      Eigen::RowVectorXd v = -(omega.potential_row(node.x, t) * du);
      if (!node.in_cavity) v += cav.potential_row(node.x, t) * dw;
      return v;
    };
    auto grad = [&](double t) -> Eigen::MatrixXd {
      Eigen::MatrixXd gv = -(omega.gradient_rows(node.x, t) * du);
      if (!node.in_cavity) gv += cav.gradient_rows(node.x, t) * dw;
      return gv;
    };
    Eigen::RowVectorXd acc = 0.5 * value(grid.T).array().square().matrix();
    for (const auto& [t, w] : times) acc += w * grad(t).colwise().squaredNorm();
    contrib.row(static_cast<Eigen::Index>(p)) = -node.area * acc;
  });
  std::vector<double> out(static_cast<std::size_t>(nphi));
  for (int j = 0; j < nphi; ++j) out[static_cast<std::size_t>(j)] = contrib.col(j).sum();
  return out;
}

CheckReport check_forward_convergence(const VerifySetup& setup) {
  CheckReport r;
  r.name = "forward_convergence";
  const int levels[3] = {16, 32, 64};
  std::vector<double> errors;
  try {
    for (int n : levels) {
      const TimeGrid grid(setup.T, n);
      const NeumannSolver solver({Component{make_curve(CurveSpec::circle(0.0, 0.0, 1.0), n), Side::inside}}, grid,
                                 setup.options);
      BoundaryField flux(n, n);
      flux.values.setOnes();
      const BoundaryField u = column_of(solver.trace(to_series(solver.solve(flux))), 0);
      const std::vector<double> ref = radial_disk_trace(1.0, 1.0, grid);
      double num = 0.0, den = 0.0;
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          const double d = u.values(i, k) - ref[static_cast<std::size_t>(k)];
          num += d * d;
          den += ref[static_cast<std::size_t>(k)] * ref[static_cast<std::size_t>(k)];
        }
      }
      errors.push_back(std::sqrt(num / den));
      r.add("rel_l2_error_M" + std::to_string(n), errors.back());
    }
  } catch (const NumericalError& e) {
    r.note = e.what();
    r.passed = false;
    return r;
  }
  const double order_a = std::log2(errors[0] / errors[1]);
  const double order_b = std::log2(errors[1] / errors[2]);
  r.add("order_16_32", order_a);
  r.add("order_32_64", order_b);
  r.passed = std::isfinite(errors[1]) && errors[1] <= kForwardTolerance && errors[2] < errors[1] &&
             errors[1] < errors[0] && std::min(order_a, order_b) >= 1.0;
  r.note = "unit disk, uniform flux, radial Crank-Nicolson oracle";
  return r;
}

CheckReport check_duality(const VerifySetup& setup) {
  CheckReport r;
  r.name = "duality";
  if (!setup.cavity) {
    r.passed = true;
    r.note = "no cavity; vacuous";
    return r;
  }
  constexpr int kPairs = 10;
  double medians[2] = {0.0, 0.0};
  for (int level = 0; level < 2; ++level) {
    const ForwardModel model(setup.level(level));
    std::mt19937_64 rng(setup.seed * 7919 + 2);
    std::vector<double> res;
    for (int p = 0; p < kPairs; ++p) {
      const BoundaryField phi = smooth_random_field(model.omega_curve(), model.grid(), rng);
      const BoundaryField theta = smooth_random_field(model.cavity_curve(), model.grid(), rng);
      res.push_back(duality_residual(model, phi, theta));
    }
    medians[level] = median(res);
    r.add(level == 0 ? "median_residual_base" : "median_residual_refined", medians[level]);
    r.add(level == 0 ? "max_residual_base" : "max_residual_refined", *std::max_element(res.begin(), res.end()));
  }
  r.add("refinement_ratio", medians[1] / medians[0]);
  r.passed = medians[0] <= kBaseTolerance && medians[1] <= 0.5 * medians[0];
  return r;
}

CheckReport check_factorization(const VerifySetup& setup) {
  CheckReport r;
  r.name = "factorization";
  double e35[2] = {0.0, 0.0}, e37[2] = {0.0, 0.0};
  for (int level = 0; level < 2; ++level) {
    const ForwardModel model(setup.level(level));
    const OperatorSet ops = assemble_operators(model);
    const std::string tag = level == 0 ? "_base" : "_refined";
    if (!model.has_cavity()) {
      const double diff = (ops.lambda_d - ops.lambda_0).frobenius();
      r.add("lambda_difference_norm" + tag, diff);
      e35[level] = diff;
      e37[level] = assemble_N(model, ops).matrix.norm();
      r.add("N_norm" + tag, e37[level]);
      continue;
    }
    const CausalOperator diff = ops.lambda_d - ops.lambda_0;
    const CausalOperator composed = ops.Lhat.compose(ops.FL);
    e35[level] = (diff - composed).frobenius() / diff.frobenius();
    const Eigen::MatrixXd n1 = anticausal_product(ops.Lhat, ops.FL);
    const Eigen::MatrixXd n2 =
        anticausal_product(lhat_from_duality(ops.L, model.omega_curve(), model.cavity_curve()), ops.FL);
    e37[level] = (n1 - n2).norm() / n1.norm();
    r.add("lambda_vs_Lhat_FL" + tag, e35[level]);
    r.add("N_vs_dual_route" + tag, e37[level]);
  }
  if (!setup.cavity) {
    r.passed = e35[0] == 0.0 && e37[0] == 0.0 && e35[1] == 0.0 && e37[1] == 0.0;
    r.note = "no cavity; both sides vanish";
    return r;
  }
  r.passed = e35[0] <= kBaseTolerance && e37[0] <= kBaseTolerance && refines(e35[0], e35[1]) && refines(e37[0], e37[1]);
  r.note = "refinement counts as decreasing, or at or below 1e-12 on both levels";
  return r;
}

CheckReport check_F_sign(const VerifySetup& setup) {
  CheckReport r;
  r.name = "F_sign";
  if (!setup.cavity) {
    r.passed = true;
    r.note = "no cavity; vacuous";
    return r;
  }
  constexpr int kSamples = 20;
  const ForwardModel model(setup.level(0));
  std::mt19937_64 rng(setup.seed * 7919 + 4);
  std::vector<BoundaryField> phis;
  std::vector<double> forms;
  double worst_ratio = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    phis.push_back(smooth_random_field(model.omega_curve(), model.grid(), rng));
    const BoundaryField lphi = model.apply_L(phis.back());
    const BoundaryField flphi = model.apply_FL(phis.back());
    const double q = inner_w(flphi, lphi, model.cavity_curve(), model.grid());
    const double n2 = inner_w(lphi, lphi, model.cavity_curve(), model.grid());
    forms.push_back(q);
    worst_ratio = std::max(worst_ratio, q / n2);
  }
  r.add("max_form_over_norm2", worst_ratio);
  const bool sign_ok = worst_ratio <= kSignTolerance;
  bool energy_ok = true;
  if (concentric_circles(model.setup())) {
    const std::vector<double> energy = energy_quadratic_forms(model, phis);
    double worst = 0.0;
    std::vector<double> rel;
    for (std::size_t i = 0; i < energy.size(); ++i) {
      rel.push_back(std::abs(forms[i] - energy[i]) / std::abs(energy[i]));
      worst = std::max(worst, rel.back());
    }
    r.add("energy_max_rel_diff", worst);
    r.add("energy_median_rel_diff", median(rel));
    energy_ok = worst <= kEnergyTolerance;
  } else {
    r.note = "energy cross-check needs concentric circles; skipped";
  }
  r.passed = sign_ok && energy_ok;
  return r;
}

CheckReport check_spectrum(const VerifySetup& setup) {
  CheckReport r;
  r.name = "spectrum";
  const Pipeline p(setup.level(0));
  const Eigen::MatrixXd& S = p.sym.S;
  const double snorm = S.norm();
  const double asym = snorm > 0.0 ? (S - S.transpose()).norm() / snorm : 0.0;
  r.add("symmetry_defect", asym);
  if (snorm == 0.0) {
    r.passed = true;
    r.note = "S = 0; vacuous";
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lam = es.eigenvalues().reverse();
  const double ratio = lam(lam.size() - 1) / lam(0);
  r.add("lambda_1", lam(0));
  r.add("min_over_lambda_1", ratio);
  for (int n : {2, 5, 10, 20, 50, 100, 200, 500}) {
    if (n <= lam.size()) r.add("decay_" + std::to_string(n), lam(n - 1) / lam(0));
  }
  r.passed = ratio >= -kPsdTolerance && asym <= kSymmetryTolerance;
  return r;
}

CheckReport check_probe_dichotomy(const VerifySetup& setup) {
  CheckReport r;
  r.name = "probe_dichotomy";
  if (!setup.cavity) {
    r.passed = true;
    r.note = "no cavity; vacuous";
    return r;
  }
  constexpr int kPerSide = 5;
  const Pipeline p(setup.level(0));
  const EigenSystem eig = eigendecompose(p.sym.S, p.n.gram_domain, 1e-8);
  const std::vector<ProbePoint> grid =
      sampling_points(p.model.omega_curve(), &*setup.cavity, p.model.grid(), SamplingSpec{});
  std::vector<ProbePoint> in, out;
  for (const ProbePoint& q : grid) (point_in_region(q.y, *setup.cavity) ? in : out).push_back(q);
  if (in.size() < kPerSide || out.size() < kPerSide) throw Error("too few probe points on one side of the cavity");

  auto pick = [&](const std::vector<ProbePoint>& all) {
    std::vector<ProbePoint> chosen;
    for (int i = 0; i < kPerSide; ++i) chosen.push_back(all[(2 * i + 1) * all.size() / (2 * kPerSide)]);
    return chosen;
  };
  auto evaluate = [&](const std::vector<ProbePoint>& pts, std::vector<double>& w, std::vector<double>& growth) {
    for (const ProbePoint& q : pts) {
      const Eigen::VectorXd probe = green_probe_trace(p.model.omega_solver(), q.y, q.s).flatten();
      w.push_back(picard_indicator(eig, probe));
      const std::vector<double> sums = picard_partial_sums(eig, probe);
      const std::size_t n = sums.size();
      const std::size_t k0 = std::max<std::size_t>(1, (n + 9) / 10);
      growth.push_back(sums.back() / sums[k0 - 1]);
    }
  };
  std::vector<double> w_in, w_out, g_in, g_out;
  evaluate(pick(in), w_in, g_in);
  evaluate(pick(out), w_out, g_out);
  const double min_in = *std::min_element(w_in.begin(), w_in.end());
  const double max_out = *std::max_element(w_out.begin(), w_out.end());
  for (int i = 0; i < kPerSide; ++i) {
    r.add("W_interior_" + std::to_string(i), w_in[static_cast<std::size_t>(i)]);
    r.add("W_exterior_" + std::to_string(i), w_out[static_cast<std::size_t>(i)]);
  }
  r.add("min_W_interior", min_in);
  r.add("max_W_exterior", max_out);
  r.add("median_growth_interior", median(g_in));
  r.add("median_growth_exterior", median(g_out));
  r.add("retained", eig.retained);
  r.passed = min_in > max_out;
  return r;
}

std::vector<CheckReport> run_all_checks(const VerifySetup& setup) {
  return {check_forward_convergence(setup), check_duality(setup),  check_factorization(setup),
          check_F_sign(setup),              check_spectrum(setup), check_probe_dichotomy(setup)};
}

bool all_passed(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const CheckReport& r) { return !r.thresholded || r.passed; });
}

}  // namespace heatfm
