#pragma once

#include <stdexcept>
#include <string>

namespace npk {

enum class ErrorKind {
  DegenerateMetric,
  ShapeMismatch,
  NullPivotExhausted,
  InconsistentAssignment,
  NullLength,
  NumericalBreakdown,
  MissingField,
  NotConstantType,
  ZeroParameter,
  PreconditionFailed,
  NotTwistorialType,
  NotScalar,
  MissingConnection,
  ParseError,
  JacobiViolation,
  InvarianceViolation,
  ReductivityViolation,
  NotFound,
  IrrationalValue,
  NonFinite,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Load-time failures map to CLI exit code 2, precondition failures to 3.
bool is_load_error(ErrorKind k);

}  // namespace npk
