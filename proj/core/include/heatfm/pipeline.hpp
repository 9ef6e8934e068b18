#pragma once

#include <string>

#include "heatfm/config.hpp"

namespace heatfm {

/// Process exit codes of the command-line driver.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitConfig = 1,
  kExitNumerical = 2,
  kExitCheckFailed = 3,
};

/// Writes lambda_D.stop1, lambda_0.stop1 and N.stop1 with .gram companions,
/// plus meta.json. Noise, when requested, perturbs lambda_D and N.
void cmd_simulate(const RunConfig& config, const std::string& config_text);

/// Reads N.stop1 from the output directory and writes spectrum.csv,
/// indicator.csv and summary.json.
void cmd_reconstruct(const RunConfig& config);

/// Reads N.stop1 and writes spectrum.csv.
void cmd_spectrum(const RunConfig& config);

/// Runs the oracle suite and writes verify.json. Returns true iff every
/// thresholded check passed.
bool cmd_verify(const RunConfig& config);

}  // namespace heatfm
