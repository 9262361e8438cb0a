#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace algebroid {

/// Coarse failure class, used by the command-line front end to pick an exit code.
enum class ErrorCategory {
  usage,
  schema,
  verification,
  numerical,
};

/// Base of every error thrown by the library.
///
/// Context strings (entry indices, timestamps, field paths) are prepended as
/// the error propagates outward, so the final message reads outermost-first.
class Error : public std::exception {
 public:
  Error(ErrorCategory category, std::string message)
      : category_(category), message_(std::move(message)) {}

  const char* what() const noexcept override { return message_.c_str(); }
  ErrorCategory category() const noexcept { return category_; }

  void add_context(const std::string& context) { message_ = context + ": " + message_; }

 private:
  ErrorCategory category_;
  std::string message_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& detail);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& name)
      : Error(ErrorCategory::numerical, "unbound variable '" + name + "'") {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCategory::numerical, "domain error: " + what) {}
};

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string& what)
      : Error(ErrorCategory::schema, "shape mismatch: " + what) {}
};

class IllegalTensorForLevel : public Error {
 public:
  IllegalTensorForLevel(const std::string& tensor, const std::string& level)
      : Error(ErrorCategory::schema,
              "tensor '" + tensor + "' must vanish for a " + level + " product") {}
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(ErrorCategory::schema, path.empty() ? what : path + ": " + what) {}
};

class ArityError : public Error {
 public:
  explicit ArityError(const std::string& what) : Error(ErrorCategory::schema, "arity: " + what) {}
};

class SingularLagrangian : public Error {
 public:
  explicit SingularLagrangian(double condition)
      : Error(ErrorCategory::numerical,
              "singular Lagrangian: fiber Hessian condition number " + std::to_string(condition)),
        condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class StepUnderflow : public Error {
 public:
  StepUnderflow(double t, double h)
      : Error(ErrorCategory::numerical, "step size " + std::to_string(h) +
                                            " fell below the minimum at t=" + std::to_string(t)) {}
};

class UnknownScenario : public Error {
 public:
  explicit UnknownScenario(const std::string& name)
      : Error(ErrorCategory::usage, "unknown scenario '" + name + "'") {}
};

}  // namespace algebroid
