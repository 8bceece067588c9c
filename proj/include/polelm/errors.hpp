#pragma once

#include <stdexcept>
#include <string>

namespace polelm {

// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// RANSAC could not generate a single hypothesis.
class NoHypothesisError : public std::runtime_error {
 public:
  explicit NoHypothesisError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// A bounded procedure (placement, oracle enumeration) exceeded its limit.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Hypothesis pair too close together to define a stable transform.
class DegenerateGeometryError : public std::runtime_error {
 public:
  explicit DegenerateGeometryError(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace polelm
