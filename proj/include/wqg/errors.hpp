#pragma once

#include <stdexcept>
#include <string>

namespace wqg {

// Malformed or inconsistent user input (parameters, config files, initial data).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operands defined on different bases, grids, or parameter values.
class MismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine could not reach its stated accuracy.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested time step violates the stability guard.
class StepSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or unbounded growth detected during a run.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wqg
