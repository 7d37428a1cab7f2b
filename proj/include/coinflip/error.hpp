#pragma once

#include <stdexcept>
#include <string>

namespace coinflip {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad coordinate, out-of-range parameter, unparsable spec.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An exact computation would exceed a configured size bound
// (MAX_ARITY for truth tables, the exact-evaluation bit budget, ...).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// The starting probability toward the target outcome is below gamma.
class NotEnoughMass : public Error {
 public:
  using Error::Error;
};

// A pipeline schedule is arithmetically inconsistent (divisibility, beta > 2^s, empty stage).
class ScheduleError : public Error {
 public:
  using Error::Error;
};

// An inequality that the attack algorithm relies on failed at runtime.
// `trace` carries a JSON dump of the run state at the failure point.
class AssertionFailure : public Error {
 public:
  AssertionFailure(const std::string& what, std::string trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::string& trace() const { return trace_; }

 private:
  std::string trace_;
};

}  // namespace coinflip
