#pragma once

#include <stdexcept>
#include <string>

namespace amgf {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message carries the offending line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A matrix expected to be symmetric positive definite is not.
class NotSpdError : public Error {
 public:
  using Error::Error;
};

/// Multigrid hierarchy construction failed.
class SetupError : public Error {
 public:
  using Error::Error;
};

/// Mesh or contact geometry is degenerate.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Krylov breakdown caused by an indefinite operator or preconditioner.
class BreakdownError : public Error {
 public:
  enum class Source { kOperator, kPreconditioner };
  BreakdownError(Source source, const std::string& what) : Error(what), source_(source) {}
  Source source() const noexcept { return source_; }

 private:
  Source source_;
};

/// Interior-point failure (line search, regularization).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment or solver configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace amgf
