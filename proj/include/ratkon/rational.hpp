#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace ratkon {

/// Exact arbitrary-precision rational scalar used throughout the library.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

inline Rat rat(long long num, long long den = 1) { return Rat(Int(num), Int(den)); }

inline Int factorial(unsigned n) {
  Int r = 1;
  for (unsigned k = 2; k <= n; ++k) r *= k;
  return r;
}

inline Rat inv_factorial(unsigned n) { return Rat(Int(1), factorial(n)); }

/// Renders without a denominator when integral: "3", "-2/5".
inline std::string to_string(const Rat& q) { return q.str(); }

}  // namespace ratkon
