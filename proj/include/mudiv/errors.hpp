#pragma once

#include <stdexcept>
#include <string>

namespace mudiv {

// Argument outside the mathematical domain of a formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Training would consume the entire power budget (alpha * P_T >= P).
class InfeasiblePolicyError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input is valid mathematically but outside what an implementation supports.
class UnsupportedRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

namespace detail {
inline void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}
}  // namespace detail

}  // namespace mudiv
