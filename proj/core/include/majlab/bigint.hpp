#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

namespace majlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline std::string to_string(const BigInt& v) { return v.str(); }

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }

inline double to_double(const BigRational& q) { return q.convert_to<double>(); }

/// Natural logarithm of a positive rational, safe for values whose
/// numerator/denominator overflow double.
inline double log_rational(const BigRational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  auto log_big = [](const BigInt& v) {
    const unsigned bits = boost::multiprecision::msb(v);
    if (bits < 500) return std::log(v.convert_to<double>());
    const unsigned shift = bits - 500;
    const BigInt scaled = v >> shift;
    return std::log(scaled.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
  };
  return log_big(num) - log_big(den);
}

} // namespace majlab
