#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdfp {

// Base of every error thrown by the library. The CLI maps all of these to
// exit code 1 except ConvergenceError / DivergenceError.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scalar argument outside its admissible range (negative threshold,
// out-of-range block index, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Vector or operator dimensions that do not chain.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A solver configuration that violates a step-size bound or a sampling
// condition. The message names the violated inequality and the bound.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An update requested for a problem shape it does not handle (e.g. the
// two-block scheme with a non-zero g).
class ModeError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

// Graph does not satisfy connectivity / no-self-loop requirements.
class GraphError : public Error {
 public:
  using Error::Error;
};

// A simulated agent read a mailbox slot that its neighbour never wrote.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// An iterative procedure ran out of iterations. Carries the last estimate so
// callers can still inspect it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_estimate)
      : Error(what), last_estimate_(last_estimate) {}

  double last_estimate() const { return last_estimate_; }

 private:
  double last_estimate_;
};

// Iterates blew up, which signals a step-size or operator-norm bug.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdfp
