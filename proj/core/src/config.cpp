#include "heatfm/config.hpp"

#include <charconv>
#include <sstream>

#include "heatfm/error.hpp"
#include "heatfm/io.hpp"

namespace heatfm {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return out;
}

int to_count(const std::string& key, const std::string& v) {
  const long long n = to_integer(key, v);
  if (n < 0 || n > 1'000'000) throw ConfigError(key + ": out of range");
  return static_cast<int>(n);
}

CurveSpec to_curve(const std::string& key, const std::string& v) {
  try {
    return CurveSpec::parse(v);
  } catch (const GeometryError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

double RunConfig::effective_tau() const {
  if (tau) return *tau;
  return noise.level > 0.0 ? noise.level : 1e-8;
}

void RunConfig::validate() const {
  if (m_omega < 8 || m_cavity < 8 || nt < 8) throw ConfigError("M_omega, M_cavity and Nt must be >= 8");
  if (sampling.nx < 8 || sampling.ny < 8) throw ConfigError("sampling_nx and sampling_ny must be >= 8");
  if (sampling.s_slices < 1) throw ConfigError("sampling_s_slices must be >= 1");
  if (sampling.margin < 0.0) throw ConfigError("sampling_margin must be >= 0");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  const double t = effective_tau();
  if (!(t > 0.0 && t < 1.0)) throw ConfigError("tau must lie in (0, 1)");
  if (!(noise.level >= 0.0 && noise.level < 1.0)) throw ConfigError("noise must lie in [0, 1)");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
  try {
    omega.validate();
    if (cavity) {
      cavity->validate();
      require_nested(*cavity, omega);
    }
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
}

ProblemSetup RunConfig::problem() const {
  ProblemSetup p;
  p.omega = omega;
  p.cavity = cavity;
  p.m_omega = m_omega;
  p.m_cavity = m_cavity;
  p.grid = TimeGrid(T, nt);
  return p;
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "omega = " << omega.to_string() << '\n';
  out << "cavity = " << (cavity ? cavity->to_string() : std::string("none")) << '\n';
  out << "M_omega = " << m_omega << '\n';
  out << "M_cavity = " << m_cavity << '\n';
  out << "Nt = " << nt << '\n';
  out << "T = " << format_double(T) << '\n';
  out << "tau = " << format_double(effective_tau()) << '\n';
  out << "noise = " << format_double(noise.level) << '\n';
  out << "seed = " << noise.seed << '\n';
  out << "sampling_nx = " << sampling.nx << '\n';
  out << "sampling_ny = " << sampling.ny << '\n';
  out << "sampling_s_slices = " << sampling.s_slices << '\n';
  out << "sampling_margin = " << format_double(sampling.margin) << '\n';
  out << "threshold = " << format_double(threshold) << '\n';
  out << "out_dir = " << out_dir.string() << '\n';
  return out.str();
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(key + ": empty value");
    if (key == "omega") {
      c.omega = to_curve(key, value);
    } else if (key == "cavity") {
      c.cavity = value == "none" ? std::nullopt : std::optional<CurveSpec>(to_curve(key, value));
    } else if (key == "M_omega") {
      c.m_omega = to_count(key, value);
    } else if (key == "M_cavity") {
      c.m_cavity = to_count(key, value);
    } else if (key == "Nt") {
      c.nt = to_count(key, value);
    } else if (key == "T") {
      c.T = to_double(key, value);
    } else if (key == "tau") {
      c.tau = to_double(key, value);
    } else if (key == "noise") {
      c.noise.level = to_double(key, value);
    } else if (key == "seed") {
      const long long s = to_integer(key, value);
      if (s < 0) throw ConfigError("seed must be non-negative");
      c.noise.seed = static_cast<std::uint64_t>(s);
    } else if (key == "sampling_nx") {
      c.sampling.nx = to_count(key, value);
    } else if (key == "sampling_ny") {
      c.sampling.ny = to_count(key, value);
    } else if (key == "sampling_s_slices") {
      c.sampling.s_slices = to_count(key, value);
    } else if (key == "sampling_margin") {
      c.sampling.margin = to_double(key, value);
    } else if (key == "threshold") {
      c.threshold = to_double(key, value);
    } else if (key == "out_dir") {
      c.out_dir = value;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

}  // namespace heatfm
