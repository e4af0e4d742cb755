#pragma once

#include <stdexcept>
#include <string>

namespace agdmm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero in finite field") {}
};

class FieldMismatch : public Error {
 public:
  FieldMismatch() : Error("operands belong to different fields") {}
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A coefficient was requested at or beyond the known precision of a series.
class PrecisionExceeded : public Error {
 public:
  using Error::Error;
};

/// The valuation of a series cannot be determined at its current precision.
class IndeterminateValuation : public Error {
 public:
  using Error::Error;
};

class EvaluationAtExcludedPlace : public Error {
 public:
  using Error::Error;
};

/// A shift form has zeros at places of degree > 1.
class NonSplitFiber : public Error {
 public:
  using Error::Error;
};

class UnsupportedDivisor : public Error {
 public:
  using Error::Error;
};

class SearchExhausted : public Error {
 public:
  using Error::Error;
};

class DependentInput : public Error {
 public:
  using Error::Error;
};

class InsufficientResults : public Error {
 public:
  using Error::Error;
};

/// Decoding system lost rank. Unreachable with >= R results on a valid instance.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class InsufficientSurvivors : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

enum class BuildErrorCode {
  InvalidPartition,
  GenusMismatch,
  ThresholdExceedsPlaces,
  InsufficientPlaces,
  SemigroupPreconditionFailed,
  ConditionViolated,
};

const char* to_string(BuildErrorCode code) noexcept;

class BuildError : public Error {
 public:
  BuildError(BuildErrorCode code, const std::string& what)
      : Error(std::string(to_string(code)) + ": " + what), code_(code) {}
  BuildErrorCode code() const noexcept { return code_; }

 private:
  BuildErrorCode code_;
};

}  // namespace agdmm
