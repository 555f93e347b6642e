#pragma once

#include <stdexcept>
#include <string>

namespace tplan {

/// Broad failure classes. The CLI maps them onto exit codes.
enum class ErrorKind {
  kValidation,  // malformed or inconsistent input
  kInfeasible,  // no solution exists under the stated constraints
  kTimeout,     // wall-clock limit hit
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what)
      : Error(ErrorKind::kInfeasible, what) {}
};

class TimeoutError : public Error {
 public:
  explicit TimeoutError(const std::string& what)
      : Error(ErrorKind::kTimeout, what) {}
};

// Named failures. Each derives from the class that fixes its exit code.

class EmptyDatasetError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PairNeverCoOccursError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ActionSetMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InfeasibleRegionError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class NoFeasibleAssignmentError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class NoSymbolicSolutionError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class InfeasibleConstraintsError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class SpecInfeasibleError : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

}  // namespace tplan
