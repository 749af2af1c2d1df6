#pragma once

#include <stdexcept>
#include <string>

namespace spherebranch {

enum class ErrorKind {
  InvalidInput,          // malformed problem file or arguments
  InvalidTruncation,     // truncation size incompatible with a builder
  ConstraintViolation,   // e.g. a point off the unit sphere
  PencilDegenerate,      // no regular point found for L - lambda C
  NotAnEigenvalue,
  SingularArgument,      // an argument that must be regular is an eigenvalue
  DegenerateDifferential,
  NonIsolatingInterval,
  EndpointCollision,
  EpsilonExhausted,
  NotTransversal,
  UnsupportedMap,
  FitError,
  ResolutionError,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Process exit code used by the command-line tool: 3 for bad input, 2 otherwise.
  int exit_code() const noexcept {
    return (kind_ == ErrorKind::InvalidInput || kind_ == ErrorKind::InvalidTruncation) ? 3 : 2;
  }

 private:
  ErrorKind kind_;
};

}  // namespace spherebranch
