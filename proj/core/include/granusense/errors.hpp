#pragma once

#include <stdexcept>
#include <string>

namespace granusense {

// Base class for all library errors so callers can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument or state: out-of-range property, degenerate geometry,
// mismatched dimensions, non-finite input.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// Content would pour past the container rim at the requested tilt.
class SpillError : public Error {
 public:
  explicit SpillError(const std::string& what) : Error(what) {}
};

// Force delta below the empty-container weight; mass would come out negative.
class NegativeMassError : public Error {
 public:
  explicit NegativeMassError(const std::string& what) : Error(what) {}
};

// Malformed run configuration; carries the 1-based line of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Filesystem or format failure while reading/writing artifacts.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace granusense
