#pragma once

#include <stdexcept>
#include <string>

namespace steklov {

/// Base class for all engine errors. Subcommands map these to exit code 1,
/// ConfigError to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct GeometryError : Error {
  using Error::Error;
};

struct MapError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct MeasureError : Error {
  using Error::Error;
};

struct InfeasibleError : Error {
  using Error::Error;
};

struct SolverError : Error {
  using Error::Error;
};

struct WitnessError : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

} // namespace steklov
