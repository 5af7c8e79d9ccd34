#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qheun {

enum class ErrorKind {
  InvalidParams,
  IrregularPoint,
  NonRealExponent,
  ExponentMismatch,
  NotReducible,
  PochhammerPole,
  DegenerateBeta,
  ClosureViolation,
  ConvergenceFailure,
  CoincidentSingularities,
  ResonantLogarithmic,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qheun
