#pragma once

#include <stdexcept>
#include <string>

namespace asymgame {

// Malformed input: shapes, probability vectors, guards.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A state that valid inputs never produce (e.g. an empty plan column).
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An LP or pivoting routine failed to reach optimality.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, long iterations)
      : std::runtime_error(what + " (after " + std::to_string(iterations) +
                           " iterations)"),
        iterations_(iterations) {}
  long iterations() const { return iterations_; }

 private:
  long iterations_;
};

// Non-finite state produced by the integrator.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, int stage)
      : std::runtime_error(what + " at stage " + std::to_string(stage)),
        stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

}  // namespace asymgame
