#pragma once

#include <stdexcept>
#include <string>

namespace hotion {

/// Coarse classification used to map failures onto stable exit/status codes.
enum class ErrorCategory {
  Config,      // malformed or inconsistent input configuration
  Simulation,  // a precondition of a simulation operation was violated
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ErrorCategory category() const noexcept { return ErrorCategory::Simulation; }
};

#define HOTION_DEFINE_ERROR(Name)        \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

HOTION_DEFINE_ERROR(IndexError);
HOTION_DEFINE_ERROR(ShapeError);
HOTION_DEFINE_ERROR(TruncationLeakage);
HOTION_DEFINE_ERROR(DomainError);
HOTION_DEFINE_ERROR(DivisionByZero);
HOTION_DEFINE_ERROR(NonPositiveChi);
HOTION_DEFINE_ERROR(NormDrift);
HOTION_DEFINE_ERROR(UndefinedPhase);
HOTION_DEFINE_ERROR(AmbiguousExtraction);

#undef HOTION_DEFINE_ERROR

class ConfigError : public Error {
 public:
  using Error::Error;
  ErrorCategory category() const noexcept override { return ErrorCategory::Config; }
};

}  // namespace hotion
