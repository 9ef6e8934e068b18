#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "heatfm/config.hpp"
#include "heatfm/error.hpp"
#include "heatfm/io.hpp"
#include "heatfm/parallel.hpp"
#include "heatfm/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"heatfm: cavity recovery in a heat conductor by the factorization method"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<long long> seed;
  std::optional<double> noise;
  int threads = 1;
  auto* simulate = app.add_subcommand("simulate", "assemble lambda_D, lambda_0 and N");
  auto* reconstruct = app.add_subcommand("reconstruct", "spectrum and indicator grid from N");
  auto* verify = app.add_subcommand("verify", "run the oracle suite");
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the symmetrized N");
  for (CLI::App* sub : {simulate, reconstruct, verify, spectrum}) {
    sub->add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
    sub->add_option("--seed", seed, "random seed (overrides seed)");
    sub->add_option("--noise", noise, "relative noise level (overrides noise)");
    sub->add_option("--threads", threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? heatfm::kExitSuccess : heatfm::kExitConfig;
  }

  try {
    heatfm::set_thread_count(threads);
    const std::string text = heatfm::read_text_file(config_path);
    heatfm::RunConfig config = heatfm::parse_config(text);
    if (out_dir) config.out_dir = *out_dir;
    if (seed) {
      if (*seed < 0) throw heatfm::ConfigError("seed must be non-negative");
      config.noise.seed = static_cast<std::uint64_t>(*seed);
    }
    if (noise) config.noise.level = *noise;
    config.validate();

    if (simulate->parsed()) heatfm::cmd_simulate(config, text);
    if (reconstruct->parsed()) heatfm::cmd_reconstruct(config);
    if (spectrum->parsed()) heatfm::cmd_spectrum(config);
    if (verify->parsed() && !heatfm::cmd_verify(config)) {
      std::cerr << "heatfm: one or more checks failed\n";
      return heatfm::kExitCheckFailed;
    }
  } catch (const heatfm::ConfigError& e) {
    std::cerr << "heatfm: config error: " << e.what() << '\n';
    return heatfm::kExitConfig;
  } catch (const heatfm::GeometryError& e) {
    std::cerr << "heatfm: config error: " << e.what() << '\n';
    return heatfm::kExitConfig;
  } catch (const heatfm::Error& e) {
    std::cerr << "heatfm: numerical failure: " << e.what() << '\n';
    return heatfm::kExitNumerical;
  }
  return heatfm::kExitSuccess;
}
