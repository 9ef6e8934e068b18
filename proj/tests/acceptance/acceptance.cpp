// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "heatfm/config.hpp"
#include "heatfm/io.hpp"
#include "heatfm/ndmap.hpp"
#include "heatfm/parallel.hpp"
#include "heatfm/pipeline.hpp"
#include "heatfm/recon.hpp"
#include "heatfm/verify.hpp"

using namespace heatfm;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// budget <= 0 means no runtime limit.
void check_criterion(int id, const std::function<CheckReport(const VerifySetup&)>& check, double budget,
                     const std::vector<std::string>& keys) {
  const auto t0 = Clock::now();
  const CheckReport r = check(VerifySetup{});
  const double t = seconds_since(t0);
  std::string detail;
  for (const std::string& k : keys) detail += k + "=" + fmt("%.3g", r.value(k)) + " ";
  detail += "time=" + fmt("%.1f", t) + "s";
  if (budget > 0.0) detail += " (limit " + fmt("%.0f", budget) + "s)";
  report(id, r.passed && (budget <= 0.0 || t < budget), detail);
}

struct Reconstruction {
  IndicatorGrid grid;
  int retained = 0;
};

Reconstruction run_reconstruction(const RunConfig& config, const SpaceTimeOperator& n, double tau) {
  const Symmetrized sym = symmetrize(n);
  const EigenSystem eig = eigendecompose(sym.S, n.gram_domain, tau);
  const TimeGrid grid(config.T, config.nt);
  const NeumannSolver omega({Component{make_curve(config.omega, config.m_omega), Side::inside}}, grid);
  const std::vector<ProbePoint> pts = sampling_points(omega.curve(0), &*config.cavity, grid, config.sampling);
  return {reconstruct(eig, omega, pts, config.threshold, &*config.cavity), eig.retained};
}

void criteria_6_and_7() {
  const RunConfig config = parse_config("");
  const auto t0 = Clock::now();
  const ForwardModel model(config.problem());
  const SpaceTimeOperator n = assemble_N(model, assemble_operators(model));
  const Reconstruction clean = run_reconstruction(config, n, config.effective_tau());
  const double t = seconds_since(t0);

  std::vector<double> in, out;
  for (std::size_t i = 0; i < clean.grid.values.size(); ++i) {
    (clean.grid.truth[i] ? in : out).push_back(clean.grid.values[i]);
  }
  const double min_in = *std::min_element(in.begin(), in.end());
  const double max_out = *std::max_element(out.begin(), out.end());
  const double ratio = median(in) / median(out);
  const double jac = jaccard(clean.grid.mask, clean.grid.truth);
  report(6, min_in > max_out && ratio >= 5.0 && jac >= 0.5 && t < 1200.0,
         "points=" + std::to_string(in.size() + out.size()) + " min_W_in=" + fmt("%.3g", min_in) +
             " max_W_out=" + fmt("%.3g", max_out) + " median_ratio=" + fmt("%.3g", ratio) +
             " jaccard=" + fmt("%.3f", jac) + " time=" + fmt("%.1f", t) + "s (limit 1200s)");

  const double delta = 1e-3;
  const SpaceTimeOperator noisy = add_noise(n, {delta, config.noise.seed * 2 + 1});
  const Reconstruction rec = run_reconstruction(config, noisy, delta);
  const double jac_noisy = jaccard(rec.grid.mask, rec.grid.truth);
  report(7, jac - jac_noisy <= 0.15,
         "jaccard_clean=" + fmt("%.3f", jac) + " jaccard_noisy=" + fmt("%.3f", jac_noisy) +
             " degradation=" + fmt("%.3f", jac - jac_noisy) + " (limit 0.15) retained_noisy=" +
             std::to_string(rec.retained) + " retained_clean=" + std::to_string(clean.retained));
}

void criterion_8(const fs::path& scratch) {
  const char* files[] = {"lambda_D.stop1", "lambda_D.gram", "lambda_0.stop1", "N.stop1",
                         "N.gram",         "spectrum.csv",  "indicator.csv"};
  std::vector<fs::path> dirs;
  int run = 0;
  for (int threads : {1, 4, 1, 4}) {
    set_thread_count(threads);
    RunConfig config = parse_config("noise = 1e-3\nseed = 3\n");
    config.out_dir = scratch / ("run" + std::to_string(run++) + "_threads" + std::to_string(threads));
    fs::remove_all(config.out_dir);
    cmd_simulate(config, config.to_text());
    cmd_reconstruct(config);
    dirs.push_back(config.out_dir);
  }
  set_thread_count(0);
  int mismatches = 0;
  for (const char* f : files) {
    const std::string ref = read_text_file(dirs[0] / f);
    for (std::size_t d = 1; d < dirs.size(); ++d) mismatches += read_text_file(dirs[d] / f) != ref;
  }
  report(8, mismatches == 0,
         std::to_string(std::size(files)) + " files x 4 runs (threads 1,4,1,4), mismatches=" +
             std::to_string(mismatches));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "heatfm_acceptance";
  fs::create_directories(scratch);
  set_thread_count(0);
  try {
    check_criterion(1, check_forward_convergence, 30.0,
                    {"rel_l2_error_M32", "rel_l2_error_M64", "order_16_32", "order_32_64"});
    check_criterion(2, check_duality, 120.0, {"median_residual_base", "median_residual_refined", "refinement_ratio"});
    check_criterion(3, check_factorization, 600.0,
                    {"lambda_vs_Lhat_FL_base", "lambda_vs_Lhat_FL_refined", "N_vs_dual_route_base",
                     "N_vs_dual_route_refined"});
    check_criterion(4, check_F_sign, 0.0, {"max_form_over_norm2", "energy_max_rel_diff"});
    check_criterion(5, check_spectrum, 0.0, {"min_over_lambda_1", "symmetry_defect"});
    criteria_6_and_7();
    criterion_8(scratch);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
