#pragma once

#include <stdexcept>
#include <string>

namespace envkp {

/// Failure categories raised by the library. The harness maps them to exit codes.
enum class ErrorKind {
  SingularLattice,
  DegenerateSpectrum,
  BasisTooSmall,
  StepTooLarge,
  BoundViolated,
  GridMismatch,
  AliasedCell,
  ConfigInvalid,
  InsufficientPoints,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorKind kind);

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
    case ErrorKind::SingularLattice: return "SingularLattice";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::BasisTooSmall: return "BasisTooSmall";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::BoundViolated: return "BoundViolated";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::AliasedCell: return "AliasedCell";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace envkp
