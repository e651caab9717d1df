#pragma once

#include <stdexcept>
#include <string>

namespace scs {

/// A caller broke a documented precondition (bad argument, out-of-range label).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Scenario or config problem; `field` names the offending key when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The label grid is too coarse to resolve a supercritical component.
class RefineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A modelling assumption required by a prediction does not hold (e.g. (A4)).
class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The event-driven integrator could not make progress.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

}  // namespace scs
