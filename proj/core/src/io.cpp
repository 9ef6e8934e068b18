#include "heatfm/io.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "heatfm/error.hpp"

namespace heatfm {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

std::filesystem::path gram_path(const std::filesystem::path& stop1_path) {
  std::filesystem::path p = stop1_path;
  return p.replace_extension(".gram");
}

void write_stop1(const std::filesystem::path& path, const SpaceTimeOperator& op) {
  std::string text;
  text.reserve(static_cast<std::size_t>(op.matrix.size()) * 25 + 64);
  text += "STOP1 " + std::to_string(op.matrix.rows()) + ' ' + std::to_string(op.matrix.cols()) + ' ' +
          std::to_string(op.nodes) + ' ' + std::to_string(op.cells) + ' ' + format_double(op.T) + '\n';
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
      if (j > 0) text += ' ';
      text += format_double(op.matrix(i, j));
    }
    text += '\n';
  }
  write_text_file(path, text);
  std::string gram;
  for (Eigen::Index i = 0; i < op.gram_domain.size(); ++i) gram += format_double(op.gram_domain(i)) + '\n';
  write_text_file(gram_path(path), gram);
}

SpaceTimeOperator read_stop1(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string magic;
  Eigen::Index rows = 0, cols = 0;
  SpaceTimeOperator op;
  if (!(in >> magic >> rows >> cols >> op.nodes >> op.cells >> op.T) || magic != "STOP1") {
    throw ConfigError("malformed STOP1 header in " + path.string());
  }
  if (rows <= 0 || cols <= 0 || static_cast<Eigen::Index>(op.nodes) * op.cells != cols) {
    throw ConfigError("inconsistent STOP1 dimensions in " + path.string());
  }
  op.matrix.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> op.matrix(i, j))) throw ConfigError("truncated STOP1 data in " + path.string());
    }
  }
  std::istringstream g(read_text_file(gram_path(path)));
  op.gram_domain.resize(cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    if (!(g >> op.gram_domain(i)) || !(op.gram_domain(i) > 0.0)) {
      throw ConfigError("bad Gram weights for " + path.string());
    }
  }
  op.gram_codomain = op.gram_domain;
  return op;
}

void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& lambdas) {
  std::string text = "n,lambda\n";
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    text += std::to_string(i + 1) + ',' + format_double(lambdas(i)) + '\n';
  }
  write_text_file(path, text);
}

void write_indicator_csv(const std::filesystem::path& path, const IndicatorGrid& grid) {
  std::string text = "y1,y2,s,W,normalized,mask,truth\n";
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const ProbePoint& p = grid.points[i];
    text += format_double(p.y.x()) + ',' + format_double(p.y.y()) + ',' + format_double(p.s) + ',' +
            format_double(grid.values[i]) + ',' + format_double(grid.normalized[i]) + ',' +
            (grid.mask[i] ? "1" : "0") + ',' + (grid.has_truth ? (grid.truth[i] ? "1" : "0") : "") + '\n';
  }
  write_text_file(path, text);
}

std::string reports_to_json(const std::vector<CheckReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CheckReport& r : reports) {
    nlohmann::ordered_json rec;
    rec["name"] = r.name;
    rec["passed"] = r.passed;
    rec["thresholded"] = r.thresholded;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.measured) {
      if (std::isfinite(v)) {
        m[k] = v;
      } else {
        m[k] = format_double(v);
      }
    }
    rec["measured"] = m;
    rec["note"] = r.note;
    arr.push_back(rec);
  }
  nlohmann::ordered_json root;
  root["checks"] = arr;
  root["all_passed"] = all_passed(reports);
  return root.dump(2) + '\n';
}

std::string git_blob_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

}  // namespace heatfm
