#pragma once

#include <stdexcept>
#include <string>

namespace gradeloc {

// Invalid grid, scenario or flag values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A deployment plan that cannot be realised with the requested targets.
class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke an operation's precondition (e.g. unsorted input, stepping a finished walk).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gradeloc
