#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "majlab/bigint.hpp"

namespace majlab {

/// Dense integer polynomial; index i holds the coefficient of t^i.
/// Canonical form: the trailing coefficient is nonzero, and the zero
/// polynomial stores no coefficients at all.
class IntegerPolynomial {
 public:
  IntegerPolynomial() = default;
  explicit IntegerPolynomial(std::vector<BigInt> coeffs);
  IntegerPolynomial(std::initializer_list<long long> coeffs);

  static IntegerPolynomial zero() { return IntegerPolynomial{}; }
  static IntegerPolynomial constant(BigInt c);
  /// (1 + t)^n expanded by iterated convolution.
  static IntegerPolynomial one_plus_t_power(unsigned n);
  /// (1 - t)^n.
  static IntegerPolynomial one_minus_t_power(unsigned n);

  bool is_zero() const { return coeffs_.empty(); }
  /// Degree of the zero polynomial is reported as 0 by convention.
  std::size_t degree() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  const std::vector<BigInt>& coeffs() const { return coeffs_; }

  /// Coefficient of t^i; indices beyond the degree give 0.
  BigInt coeff(std::size_t i) const;

  BigInt evaluate(const BigInt& t) const;
  BigInt sum_of_coeffs() const; // = evaluate(1)

  IntegerPolynomial& operator+=(const IntegerPolynomial& other);
  IntegerPolynomial& operator-=(const IntegerPolynomial& other);
  IntegerPolynomial& operator*=(const BigInt& scalar);

  friend IntegerPolynomial operator+(IntegerPolynomial a, const IntegerPolynomial& b) {
    a += b;
    return a;
  }
  friend IntegerPolynomial operator-(IntegerPolynomial a, const IntegerPolynomial& b) {
    a -= b;
    return a;
  }
  friend IntegerPolynomial operator*(IntegerPolynomial a, const BigInt& s) {
    a *= s;
    return a;
  }
  friend IntegerPolynomial operator*(const IntegerPolynomial& a, const IntegerPolynomial& b);

  bool operator==(const IntegerPolynomial& other) const = default;

 private:
  void normalize();

  std::vector<BigInt> coeffs_;
};

} // namespace majlab
