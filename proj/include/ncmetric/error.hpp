#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ncm {

enum class ErrorKind {
  NonHermitianInput,
  SingularMatrix,
  NotPositiveDefinite,
  NotSquare,
  BaseDimMismatch,
  DimMismatch,
  NotUnitary,
  PointOutsideDomain,
  PathBlocked,
  MappingViolation,
  NestingViolation,
  DomainViolation,
  SeriesNotConverged,
  EvaluationFailure,
  NotInHalfPlane,
  SingularResolvent,
  MaxIterExceeded,
  RangeViolation,
  InvalidSpec,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the CLI in particular) can map it onto an exit status.
class NcError : public std::runtime_error {
 public:
  NcError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ncm
