#pragma once

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>

namespace qmp {

struct CaseTrace;

/// Short %g rendering for error messages.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (missing moments, degree overflow, singular transform).
class InputError : public Error {
 public:
  using Error::Error;
};

/// M(2) is singular or not positive semidefinite; the nonsingular solver does not apply.
class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was not met by its caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The conic of the rank-5 relation is degenerate in a way the solver does not cover.
class UnsupportedCaseError : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant failed beyond tolerance. Carries the branch trace when one exists.
class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what,
                            std::shared_ptr<const CaseTrace> trace = nullptr)
      : Error(what), trace_(std::move(trace)) {}

  const CaseTrace* trace() const noexcept { return trace_.get(); }

 private:
  std::shared_ptr<const CaseTrace> trace_;
};

}  // namespace qmp
