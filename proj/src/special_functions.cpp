#include "mudiv/special_functions.hpp"

namespace mudiv {

double lnln(double v) {
  if (!(v > 1.0)) throw DomainError("lnln: argument must be > 1");
  return std::log(std::log(v));
}

double harmonic_number(std::int64_t n) {
  if (n < 0) throw DomainError("harmonic_number: n must be >= 0");
  double h = 0.0;
  for (std::int64_t k = n; k >= 1; --k) h += 1.0 / static_cast<double>(k);
  return h;
}

}  // namespace mudiv
