#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace semdot {

/// Per-element scalar field (volume fractions, sensitivities, ...),
/// indexed by element id (row-major, x-fastest, origin bottom-left).
using Field = std::vector<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// Thrown when the volume target cannot be bracketed by any threshold.
class VolumeBracketError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace semdot
