#pragma once

#include <stdexcept>
#include <string>

namespace arqshare {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Outage vector and allocation lengths disagree.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Allocation violates q_1 >= 1, non-negativity or the adjacency rule.
class InfeasibleAllocation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A closed-form fold quantity could not be evaluated reliably.
class NumericalDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arqshare
