#pragma once

#include <stdexcept>
#include <string>

namespace quicksearch {

// Argument outside the mathematical domain of an operation (CLI exit code 4).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// The budget cannot fund the requested refine/observe schedule (CLI exit code 3).
class InfeasibleSchedule : public std::runtime_error {
 public:
  explicit InfeasibleSchedule(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration values (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace quicksearch
