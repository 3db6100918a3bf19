#include "krein/errors.hpp"

namespace krein {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::BvpSolveFailure: return "BvpSolveFailure";
    case ErrorKind::BirmanSchwingerSingular: return "BirmanSchwingerSingular";
    case ErrorKind::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorKind::ThresholdNotFound: return "ThresholdNotFound";
    case ErrorKind::InvalidPotential: return "InvalidPotential";
    case ErrorKind::ConstraintSingular: return "ConstraintSingular";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::MatchingSingular: return "MatchingSingular";
    case ErrorKind::OverflowGuard: return "OverflowGuard";
    case ErrorKind::NoRootInBracket: return "NoRootInBracket";
    case ErrorKind::TruncationWarning: return "TruncationWarning";
    case ErrorKind::UncertifiedPoint: return "UncertifiedPoint";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace krein
