#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swioss {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax or name-resolution failure in the expression DSL.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Malformed or inconsistent system configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the documented domain of a numeric routine.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Numerical integration failure (divergence, grid misalignment).
class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace swioss
