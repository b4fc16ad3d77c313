#pragma once

#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace masalab {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Violated precondition on an operation input.  The CLI maps this to exit 1.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Configured resource budget exceeded (interval counts, ball sizes).  Exit 2.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Global element/interval budget, overridable through SML_BUDGET.
inline std::size_t budget() {
  static const std::size_t value = [] {
    if (const char* env = std::getenv("SML_BUDGET")) {
      const long long parsed = std::atoll(env);
      if (parsed > 0) return static_cast<std::size_t>(parsed);
    }
    return static_cast<std::size_t>(1000000);
  }();
  return value;
}

inline void check_budget(std::size_t requested, const std::string& what) {
  if (requested > budget())
    throw BudgetError(what + ": " + std::to_string(requested) + " exceeds budget " +
                      std::to_string(budget()));
}

inline Complex unit_phase(double turns) {
  // e^{2*pi*i*turns}
  const double arg = 2.0 * kPi * turns;
  return {std::cos(arg), std::sin(arg)};
}

}  // namespace masalab
