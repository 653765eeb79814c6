#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point, or an intermediate value, left the domain of a closed-form map.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SingularMetricError : public Error {
 public:
  SingularMetricError(const std::string& message, double condition)
      : Error(message), condition_(condition) {}

  // Ratio of largest to smallest pivot magnitude seen during elimination.
  double condition() const { return condition_; }

 private:
  double condition_;
};

// One or more load-time invariant gates rejected a scenario.
class GateError : public Error {
 public:
  explicit GateError(std::vector<std::string> failures)
      : Error(join(failures)), failures_(std::move(failures)) {}

  const std::vector<std::string>& failures() const { return failures_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "scenario gate failed";
    for (const auto& item : items) out += "; " + item;
    return out;
  }

  std::vector<std::string> failures_;
};

}  // namespace emt
