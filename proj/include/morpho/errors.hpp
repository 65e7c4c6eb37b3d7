#pragma once

#include <stdexcept>
#include <string>

namespace morpho {

/// Bad user input: unreadable images, empty masks, invalid configs.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A summary statistic could not be formed (empty population, constant series).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a precondition. These are program bugs, not input problems.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

}  // namespace morpho
