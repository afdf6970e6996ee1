#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

// Inputs that violate a documented type invariant or precondition.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed configuration or trace files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical solver failures (eigen decomposition, fit breakdown).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace optomech
