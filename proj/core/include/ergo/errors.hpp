#pragma once

#include <stdexcept>
#include <string>

#include "ergo/rational.hpp"

namespace ergo {

/// Error families. The CLI maps each family to an exit code.
enum class ErrorKind {
  Precondition,        // bad input: malformed sets, parameters out of range
  PartiallyUndefined,  // a finite stage cannot resolve the query
  StageExhausted,      // NotFoundWithinStage, CoverageUnattainable, StageTooLarge, WindowExhausted
  Verification,        // MarginViolated, LedgerViolation, LemmaViolated, ToleranceUnmet
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), kind_(kind), name_(std::move(name)), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  const std::string& detail() const noexcept { return detail_; }  // message without the name prefix

 private:
  ErrorKind kind_;
  std::string name_;
  std::string detail_;
};

/// Raised when a query touches the undefined residual of a finite stage.
/// Carries the blocked mass and, for correlation queries, exact bounds.
class PartiallyUndefinedError : public Error {
 public:
  PartiallyUndefinedError(const std::string& what, Rational blocked, long long n = 0,
                          Rational lower = 0, Rational upper = 0)
      : Error(ErrorKind::PartiallyUndefined, "PartiallyUndefined", what),
        blocked_(std::move(blocked)), n_(n), lower_(std::move(lower)), upper_(std::move(upper)) {}

  const Rational& blockedMass() const { return blocked_; }
  long long n() const { return n_; }
  const Rational& lower() const { return lower_; }
  const Rational& upper() const { return upper_; }

 private:
  Rational blocked_;
  long long n_;
  Rational lower_, upper_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& name, const std::string& what) {
  throw Error(kind, name, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::Precondition, "PreconditionFailed", what);
}

}  // namespace ergo
