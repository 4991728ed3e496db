#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contest {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the domain of the operation (negative quality,
// rank out of range, x outside [0, 1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inputs that do not describe an admissible contest.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Query that is meaningless for the current equilibrium (e.g. G in the
// no-entry regime).
class StateError : public Error {
 public:
  using Error::Error;
};

// Iterative solver or quadrature failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double estimate)
      : Error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

// Text input that does not follow the expected grammar.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : ValidationError(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace contest
