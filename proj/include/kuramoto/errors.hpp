#pragma once

#include <stdexcept>
#include <string>

namespace kuramoto {

// Base class for failures raised at runtime (as opposed to precondition
// violations, which throw std::invalid_argument).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file. what() is formatted "path:line:column: message".
struct ParseError : Error {
  ParseError(const std::string& path, int line, int column, const std::string& message)
      : Error(path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        path(path), line(line), column(column) {}
  std::string path;
  int line;
  int column;
};

// A constructed object failed its certification gate.
struct ValidationError : Error {
  using Error::Error;
};

// A trajectory left the representable range (amplitude blow-up or shrink-to-zero).
struct DivergenceError : Error {
  DivergenceError(const std::string& message, double time)
      : Error(message + " at t = " + std::to_string(time)), time(time) {}
  double time;
};

// A matrix exponential produced non-finite entries.
struct OverflowError : Error {
  using Error::Error;
};

// Spectral surgery could not meet its accuracy gate.
struct DesignError : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace kuramoto
