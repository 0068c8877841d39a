#pragma once

#include <stdexcept>
#include <string>

namespace actlab {

// Base for every error thrown by the library. Subclasses map 1:1 onto the
// CLI exit-code taxonomy: IoError -> 1, ConfigError -> 3, everything else
// (validation) -> 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error {
  using Error::Error;
};

// File could not be parsed at all (syntax level).
struct MalformedFileError : Error {
  using Error::Error;
};

// File parsed but violates a structural invariant; message names the location.
struct InvariantViolationError : Error {
  using Error::Error;
};

struct UnknownActionError : Error {
  using Error::Error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

struct DuplicateIdsError : Error {
  using Error::Error;
};

struct LengthMismatchError : Error {
  using Error::Error;
};

struct TooShortError : Error {
  using Error::Error;
};

struct OutOfRangeError : Error {
  using Error::Error;
};

struct IndexOutOfRangeError : Error {
  using Error::Error;
};

struct TooFewCompletionsError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace actlab
