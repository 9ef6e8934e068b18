#include "heatfm/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include <json.hpp>

#include "heatfm/error.hpp"
#include "heatfm/io.hpp"
#include "heatfm/ndmap.hpp"
#include "heatfm/recon.hpp"
#include "heatfm/verify.hpp"

namespace heatfm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// N gets its own noise stream so it is independent of the one on lambda_D.
NoiseSpec n_noise(const NoiseSpec& noise) { return {noise.level, noise.seed * 2 + 1}; }

SpaceTimeOperator load_n(const RunConfig& config) {
  const auto path = config.out_dir / "N.stop1";
  if (!std::filesystem::exists(path)) throw ConfigError("missing operator file " + path.string() + " (run simulate)");
  SpaceTimeOperator n = read_stop1(path);
  if (n.nodes != config.m_omega || n.cells != config.nt || std::abs(n.T - config.T) > 1e-12 * config.T ||
      n.matrix.rows() != n.matrix.cols()) {
    throw ConfigError("N.stop1 does not match the configuration");
  }
  return n;
}

EigenSystem spectrum_of(const SpaceTimeOperator& n, double tau) {
  const Symmetrized sym = symmetrize(n);
  return eigendecompose(sym.S, n.gram_domain, tau);
}

}  // namespace

void cmd_simulate(const RunConfig& config, const std::string& config_text) {
  config.validate();
  const auto start = Clock::now();
  const ForwardModel model(config.problem());
  std::clog << "simulate: assembling operators\n";
  const OperatorSet ops = assemble_operators(model);
  const double t_assemble = seconds_since(start);

  const auto start_n = Clock::now();
  const SpaceTimeOperator lambda_0 = to_space_time(ops.lambda_0, model.omega_curve(), model.grid());
  const SpaceTimeOperator lambda_d =
      add_noise(to_space_time(ops.lambda_d, model.omega_curve(), model.grid()), config.noise);
  const SpaceTimeOperator n = add_noise(assemble_N(model, ops), n_noise(config.noise));
  const double t_n = seconds_since(start_n);

  std::clog << "simulate: writing operators to " << config.out_dir.string() << '\n';
  write_stop1(config.out_dir / "lambda_D.stop1", lambda_d);
  write_stop1(config.out_dir / "lambda_0.stop1", lambda_0);
  write_stop1(config.out_dir / "N.stop1", n);

  nlohmann::ordered_json meta;
  meta["config"] = config.to_text();
  meta["input_hash"] = git_blob_hash(config_text);
  meta["dimension"] = n.dim();
  meta["timings_seconds"] = {{"assemble", t_assemble}, {"N", t_n}, {"total", seconds_since(start)}};
  write_text_file(config.out_dir / "meta.json", meta.dump(2) + '\n');
}

void cmd_reconstruct(const RunConfig& config) {
  config.validate();
  const SpaceTimeOperator n = load_n(config);
  const EigenSystem eig = spectrum_of(n, config.effective_tau());
  write_spectrum_csv(config.out_dir / "spectrum.csv", eig.lambdas);

  const TimeGrid grid(config.T, config.nt);
  const NeumannSolver omega({Component{make_curve(config.omega, config.m_omega), Side::inside}}, grid);
  const CurveSpec* cavity = config.cavity ? &*config.cavity : nullptr;
  const std::vector<ProbePoint> points = sampling_points(omega.curve(0), cavity, grid, config.sampling);
  std::clog << "reconstruct: " << points.size() << " probe points, " << eig.retained << " retained modes\n";
  const IndicatorGrid result = reconstruct(eig, omega, points, config.threshold, cavity);
  write_indicator_csv(config.out_dir / "indicator.csv", result);

  nlohmann::ordered_json summary;
  summary["points"] = points.size();
  summary["retained"] = eig.retained;
  summary["lambda_1"] = eig.lambdas(0);
  summary["tau"] = config.effective_tau();
  summary["threshold"] = config.threshold;
  if (result.has_truth) summary["jaccard"] = jaccard(result.mask, result.truth);
  write_text_file(config.out_dir / "summary.json", summary.dump(2) + '\n');
}

void cmd_spectrum(const RunConfig& config) {
  config.validate();
  const EigenSystem eig = spectrum_of(load_n(config), config.effective_tau());
  write_spectrum_csv(config.out_dir / "spectrum.csv", eig.lambdas);
}

bool cmd_verify(const RunConfig& config) {
  config.validate();
  VerifySetup setup;
  setup.omega = config.omega;
  setup.cavity = config.cavity;
  setup.m_omega = config.m_omega;
  setup.m_cavity = config.m_cavity;
  setup.nt = config.nt;
  setup.T = config.T;
  setup.seed = config.noise.seed;
  std::vector<CheckReport> reports;
  for (auto check : {check_forward_convergence, check_duality, check_factorization, check_F_sign, check_spectrum,
                     check_probe_dichotomy}) {
    reports.push_back(check(setup));
    std::clog << "verify: " << reports.back().name << (reports.back().passed ? " pass" : " FAIL") << '\n';
  }
  write_text_file(config.out_dir / "verify.json", reports_to_json(reports));
  return all_passed(reports);
}

}  // namespace heatfm
