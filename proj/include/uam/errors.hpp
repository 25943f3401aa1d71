#pragma once

#include <stdexcept>
#include <string>

namespace uam {

// Argument outside the mathematical domain of an operation (d <= 0, NaN, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Scenario or parameter set that violates a documented invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke a precondition of a state machine transition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Numerical blow-up inside the simulation loop.
class SimulationAbort : public std::runtime_error {
 public:
  SimulationAbort(long tick, int aircraft_id, const std::string& what)
      : std::runtime_error(what), tick_(tick), aircraft_id_(aircraft_id) {}

  long tick() const noexcept { return tick_; }
  int aircraft_id() const noexcept { return aircraft_id_; }

 private:
  long tick_;
  int aircraft_id_;
};

}  // namespace uam
