#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hartreelab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the model or grid parameters is violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An exponent system has no solution; `constraint()` names the first
/// violated relation.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(std::string constraint)
      : Error("infeasible: " + constraint), constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

/// The discrete quadratic form went negative beyond round-off.
class HardyViolation : public Error {
 public:
  using Error::Error;
};

/// |u|^p overflowed; usually a collapse in progress.
class NonFinite : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class EigFailure : public Error {
 public:
  using Error::Error;
};

class CadenceError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Aggregates every problem found in a configuration, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& s : items) out += "\n  " + s;
    return out;
  }
  std::vector<std::string> problems_;
};

}  // namespace hartreelab
