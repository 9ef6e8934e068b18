#pragma once

#include <stdexcept>
#include <string>

namespace heatfm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid curve specification or a point/curve relation that violates a
/// geometric precondition (on-boundary queries, overlapping curves).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration, missing input files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Singular systems, non-positive spectra and other numerical breakdowns.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace heatfm
