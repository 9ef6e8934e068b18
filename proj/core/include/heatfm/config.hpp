#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "heatfm/geometry.hpp"
#include "heatfm/ndmap.hpp"
#include "heatfm/recon.hpp"

namespace heatfm {

/// Flat "key = value" run configuration; '#' starts a comment.
///
///   omega = circle 0 0 1        cavity = circle 0 0 0.35 | none
///   M_omega = 32  M_cavity = 24  Nt = 32  T = 0.5
///   tau = 1e-8 (defaults to the noise level when noise > 0)
///   noise = 0  seed = 1  threshold = 0.2  out_dir = out
///   sampling_nx = 21  sampling_ny = 21  sampling_s_slices = 1
///   sampling_margin = 0 (0 selects two node spacings)
struct RunConfig {
  CurveSpec omega = CurveSpec::circle(0.0, 0.0, 1.0);
  std::optional<CurveSpec> cavity = CurveSpec::circle(0.0, 0.0, 0.35);
  int m_omega = 32;
  int m_cavity = 24;
  int nt = 32;
  double T = 0.5;
  std::optional<double> tau;
  NoiseSpec noise;
  SamplingSpec sampling;
  double threshold = 0.2;
  std::filesystem::path out_dir = "out";

  /// Cutoff ratio in effect: tau when given, else noise level or 1e-8.
  double effective_tau() const;
  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  ProblemSetup problem() const;
  std::string to_text() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace heatfm
