#pragma once

#include <stdexcept>
#include <string>

namespace oulab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside the documented domain of an operation.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An iterative method stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// A state carries too much mass near the edge of the truncated box, so the
/// periodized representation no longer stands in for a function on R^N.
class DomainTruncation : public Error {
 public:
  using Error::Error;
};

/// A ratio or bound is undefined because its denominator vanished.
class DegenerateCase : public Error {
 public:
  using Error::Error;
};

/// A stability bound was requested outside the regime where it is finite.
class OutOfRegime : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace oulab
