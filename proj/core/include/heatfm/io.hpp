#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "heatfm/ndmap.hpp"
#include "heatfm/recon.hpp"
#include "heatfm/verify.hpp"

namespace heatfm {

/// STOP1 text format: header "STOP1 <rows> <cols> <M> <Nt> <T>", then one
/// matrix row per line with 17 significant digits. Gram weights go to a
/// companion file with extension .gram, one weight per line.
void write_stop1(const std::filesystem::path& path, const SpaceTimeOperator& op);
SpaceTimeOperator read_stop1(const std::filesystem::path& path);
std::filesystem::path gram_path(const std::filesystem::path& stop1_path);

/// Header "n,lambda", n starting at 1.
void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& lambdas);
/// Header "y1,y2,s,W,normalized,mask,truth"; W is "inf" for the sentinel and
/// truth is empty when unknown.
void write_indicator_csv(const std::filesystem::path& path, const IndicatorGrid& grid);

std::string reports_to_json(const std::vector<CheckReport>& reports);

/// Lowercase hex SHA-1 of "blob <size>\0" + content, as git computes it.
std::string git_blob_hash(const std::string& content);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// printf-style "%.17g".
std::string format_double(double v);

}  // namespace heatfm
