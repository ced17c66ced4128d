#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdirac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (x < 0, alpha > 1, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Malformed expression source. `offset()` is the byte offset of the offending token.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// Expression produced a non-finite value.
class EvalError : public Error {
public:
  using Error::Error;
};

/// Numerical failure inside a solver. `index()` is the grid index where it happened,
/// or npos when not tied to a grid point.
class SolverError : public Error {
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit SolverError(const std::string& what, std::size_t index = npos)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

/// Not enough nodal data to run the reconstruction.
class InsufficientData : public Error {
public:
  using Error::Error;
};

/// Invalid experiment configuration. `line()` is 1-based, 0 when unknown.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace fdirac
