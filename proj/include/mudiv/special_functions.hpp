#pragma once

// Special functions shared across modules. Every logarithm in the library
// is natural and goes through ln()/lnln() below.

#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/constants/constants.hpp>

#include "mudiv/errors.hpp"

namespace mudiv {

inline double ln(double v) { return std::log(v); }

/// log(log(v)); requires v > 1.
double lnln(double v);

/// H_n = sum_{k=1}^n 1/k, with H_0 = 0.
double harmonic_number(std::int64_t n);

namespace detail {

// E1(z) for 0 < z < 1 from the convergent series
//   E1(z) = -gamma - ln z - sum_{n>=1} (-z)^n / (n n!).
template <class Real>
Real expint_e1_series(const Real& z) {
  using std::abs;
  using std::log;
  const Real eps = std::numeric_limits<Real>::epsilon();
  Real sum = 0;
  Real power = 1;  // (-z)^n / n!
  for (int n = 1; n < 10000; ++n) {
    power *= -z / n;
    const Real term = power / n;
    sum += term;
    if (abs(term) <= eps * abs(sum)) break;
  }
  return -boost::math::constants::euler<Real>() - log(z) - sum;
}

// e^z E1(z) for z >= 1 from the continued fraction
//   E1(z) = e^{-z} / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...)))
// evaluated with the modified Lentz method.
template <class Real>
Real expint_e1_scaled_cf(const Real& z) {
  using std::abs;
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tiny = std::numeric_limits<Real>::min() / eps;
  Real b = z + 1;
  Real c = 1 / tiny;
  Real d = 1 / b;
  Real h = d;
  for (int i = 1; i < 100000; ++i) {
    const Real an = -Real(i) * i;
    b += 2;
    d = 1 / (an * d + b);
    c = b + an / c;
    const Real del = c * d;
    h *= del;
    if (abs(del - 1) <= eps) break;
  }
  return h;
}

}  // namespace detail

/// Exponential integral E1(z) = int_z^inf e^{-t}/t dt for z > 0.
/// Series below z = 1, continued fraction above.
template <class Real>
Real expint_e1(const Real& z) {
  using std::exp;
  if (!(z > 0)) throw DomainError("expint_e1: argument must be > 0");
  if (z < 1) return detail::expint_e1_series(z);
  return detail::expint_e1_scaled_cf(z) * exp(-z);
}

/// e^z E1(z), finite for arguments where e^z alone would overflow.
template <class Real>
Real expint_e1_scaled(const Real& z) {
  using std::exp;
  if (!(z > 0)) throw DomainError("expint_e1_scaled: argument must be > 0");
  if (z < 1) return exp(z) * detail::expint_e1_series(z);
  return detail::expint_e1_scaled_cf(z);
}

}  // namespace mudiv
