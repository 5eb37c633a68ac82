#pragma once

#include <stdexcept>
#include <string>

namespace bsc {

// Invalid or inconsistent input. `field()` names the offending parameter.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// The requested quantity has no closed form in this load regime
// (e.g. rho >= 1 for the quasi-stationary analysis, or the wrong offset case).
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Exhaustive enumeration or truncation budget exceeded.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bsc
