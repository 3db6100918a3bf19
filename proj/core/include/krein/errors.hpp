#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace krein {

/// Failure categories raised by the library. Each maps to one documented
/// error condition of an operation; callers switch on kind() rather than
/// parsing messages.
enum class ErrorKind {
  InvalidArgument,
  SingularMatrix,
  NoConvergence,
  NotPositiveDefinite,
  DegenerateInput,
  BvpSolveFailure,
  BirmanSchwingerSingular,
  NotAnEigenvalue,
  ThresholdNotFound,
  InvalidPotential,
  ConstraintSingular,
  StepSizeUnderflow,
  MatchingSingular,
  OverflowGuard,
  NoRootInBracket,
  TruncationWarning,
  UncertifiedPoint,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace krein
