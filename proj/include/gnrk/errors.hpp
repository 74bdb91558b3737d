#pragma once

#include <stdexcept>
#include <string>

namespace gnrk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Failure inside a single integrator call. Carries the shooting interval
/// index once the error has crossed the NLP layer (-1 before that).
class IntegratorError : public Error {
 public:
  explicit IntegratorError(const std::string& what, int stage = -1)
      : Error(what), base_(what), stage_(stage) {
    refresh();
  }

  int stage() const noexcept { return stage_; }
  void set_stage(int stage) {
    stage_ = stage;
    refresh();
  }

  const char* what() const noexcept override { return message_.c_str(); }

 private:
  void refresh() {
    message_ = stage_ < 0 ? base_ : "stage " + std::to_string(stage_) + ": " + base_;
  }

  std::string base_;
  std::string message_;
  int stage_;
};

/// Stage equations still above tolerance after the Newton iteration cap.
class NewtonNonConvergence : public IntegratorError {
 public:
  using IntegratorError::IntegratorError;
};

class SingularStageJacobian : public IntegratorError {
 public:
  using IntegratorError::IntegratorError;
};

class DareNonConvergence : public Error {
 public:
  using Error::Error;
};

class QpMaxIterations : public Error {
 public:
  using Error::Error;
};

/// Control-control block of the Riccati recursion not positive definite
/// even after regularization.
class NonConvexBlock : public Error {
 public:
  using Error::Error;
};

}  // namespace gnrk
