#include "qheun/error.hpp"

namespace qheun {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::IrregularPoint: return "IrregularPoint";
    case ErrorKind::NonRealExponent: return "NonRealExponent";
    case ErrorKind::ExponentMismatch: return "ExponentMismatch";
    case ErrorKind::NotReducible: return "NotReducible";
    case ErrorKind::PochhammerPole: return "PochhammerPole";
    case ErrorKind::DegenerateBeta: return "DegenerateBeta";
    case ErrorKind::ClosureViolation: return "ClosureViolation";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::CoincidentSingularities: return "CoincidentSingularities";
    case ErrorKind::ResonantLogarithmic: return "ResonantLogarithmic";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace qheun
