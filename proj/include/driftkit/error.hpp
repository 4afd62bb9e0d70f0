#pragma once

#include <stdexcept>
#include <string>

namespace driftkit {

enum class ErrorKind {
  Config,           // bad configuration values or missing stage artifacts
  InvalidArgument,  // operation precondition violated
  Io,               // filesystem failures
  Schema,           // malformed input files
  Numeric,          // non-finite model state or statistics
  Calibration,      // not enough data to build detector statistics
  Comparability,    // runs that cannot be compared against each other
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

// Process exit codes used by the CLI. Config-like and numeric-like kinds
// share a code; the four externally documented classes stay distinct.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
      return 2;
    case ErrorKind::Io:
      return 3;
    case ErrorKind::Schema:
      return 4;
    case ErrorKind::Numeric:
    case ErrorKind::Calibration:
      return 5;
    case ErrorKind::Comparability:
      return 6;
  }
  return 1;
}

}  // namespace driftkit
