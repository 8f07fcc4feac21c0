#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace delayop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter is outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Matrix or vector dimensions do not agree.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on input that violates its contract
/// (e.g. a circulant-only routine on a general matrix).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A network file could not be read or tokenized. `line()` is 1-based;
/// 0 means the problem is not tied to a line (e.g. missing file).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A network file parsed but its content is inconsistent
/// (asymmetric entries, negative weights, out-of-range indices).
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Floating-point failure: divergence, eigensolver breakdown, or a
/// vanishing entry before unit-modulus renormalization.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, long long step = -1)
      : Error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what), step_(step) {}
  long long step() const noexcept { return step_; }

 private:
  long long step_;
};

}  // namespace delayop
