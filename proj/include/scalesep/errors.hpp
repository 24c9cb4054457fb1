#pragma once

#include <stdexcept>
#include <string>

namespace scalesep {

// All recoverable failures surface as typed exceptions; the CLI maps them
// to stable exit codes.

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Grid too coarse for the requested scale (h > delta/4, delta < 2h, ...).
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedDimension : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateInterface : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateProfile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProfileTooWide : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MassUnreachable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace scalesep
