#pragma once

#include <stdexcept>
#include <string>

namespace qleb {

enum class ErrorKind {
  NonHermitian,
  NotPSD,
  NotStrictlyPositive,
  NotNormalized,
  DimMismatch,
  ZeroState,
  MissingLimits,
  DimVaries,
  NotPure,
  FactorNotAC,
  BlocksInconsistent,
  InvalidParams,
  DerivativeUnavailable,
  InconsistentDerivative,
  CenteringViolated,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qleb
