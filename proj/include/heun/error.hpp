#pragma once

#include <stdexcept>
#include <string>

namespace heun {

enum class ErrorKind {
  InvalidArgument,
  CoincidentSingularities,
  SingularPoint,
  PathTooClose,
  StepUnderflow,
  ResonantExponent,
  UndefinedSeries,
  NoConvergence,
  OutsideDisk,
  EpsilonMismatch,
  UnitA,
  Shortfall,
  Degenerate,
  ExceptionalEpsilon,
  VerificationFailed,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::CoincidentSingularities: return "coincident singularities";
    case ErrorKind::SingularPoint: return "singular point";
    case ErrorKind::PathTooClose: return "path too close to singularity";
    case ErrorKind::StepUnderflow: return "step-size underflow";
    case ErrorKind::ResonantExponent: return "resonant exponent";
    case ErrorKind::UndefinedSeries: return "undefined series";
    case ErrorKind::NoConvergence: return "no convergence";
    case ErrorKind::OutsideDisk: return "outside safe disk";
    case ErrorKind::EpsilonMismatch: return "epsilon mismatch";
    case ErrorKind::UnitA: return "a = 1";
    case ErrorKind::Shortfall: return "solution shortfall";
    case ErrorKind::Degenerate: return "degenerate parameters";
    case ErrorKind::ExceptionalEpsilon: return "exceptional epsilon";
    case ErrorKind::VerificationFailed: return "verification failed";
  }
  return "error";
}

}  // namespace heun
