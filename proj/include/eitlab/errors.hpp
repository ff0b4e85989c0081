#pragma once

#include <stdexcept>
#include <string>

namespace eitlab {

// Work-size limits (support budgets, memory caps, enumeration caps).
// CLI maps this to exit code 3.
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// A requested assertion-mode check failed (bound violated, regression drift).
// CLI maps this to exit code 4.
class check_error : public std::runtime_error {
 public:
  explicit check_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eitlab
