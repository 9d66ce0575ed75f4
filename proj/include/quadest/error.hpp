#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quadest {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. `position()` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Evaluation left the mathematical domain of the function
// (log of a non-positive number, division by zero, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inputs violating a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A set of halfspaces has an empty intersection.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// An inner numerical solve did not produce a usable answer.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace quadest
