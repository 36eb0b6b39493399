#include "majlab/polynomial.hpp"

#include <utility>

namespace majlab {

IntegerPolynomial::IntegerPolynomial(std::vector<BigInt> coeffs)
    : coeffs_(std::move(coeffs)) {
  normalize();
}

IntegerPolynomial::IntegerPolynomial(std::initializer_list<long long> coeffs) {
  coeffs_.reserve(coeffs.size());
  for (long long c : coeffs) coeffs_.emplace_back(c);
  normalize();
}

IntegerPolynomial IntegerPolynomial::constant(BigInt c) {
  IntegerPolynomial p;
  if (c != 0) p.coeffs_.push_back(std::move(c));
  return p;
}

IntegerPolynomial IntegerPolynomial::one_plus_t_power(unsigned n) {
  // Pascal row built additively.
  std::vector<BigInt> row{BigInt(1)};
  for (unsigned i = 0; i < n; ++i) {
    std::vector<BigInt> next(row.size() + 1, BigInt(0));
    for (std::size_t j = 0; j < row.size(); ++j) {
      next[j] += row[j];
      next[j + 1] += row[j];
    }
    row = std::move(next);
  }
  return IntegerPolynomial(std::move(row));
}

IntegerPolynomial IntegerPolynomial::one_minus_t_power(unsigned n) {
  IntegerPolynomial p = one_plus_t_power(n);
  std::vector<BigInt> c = p.coeffs_;
  for (std::size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
  return IntegerPolynomial(std::move(c));
}

BigInt IntegerPolynomial::coeff(std::size_t i) const {
  if (i >= coeffs_.size()) return BigInt(0);
  return coeffs_[i];
}

BigInt IntegerPolynomial::evaluate(const BigInt& t) const {
  BigInt acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * t + *it;
  }
  return acc;
}

BigInt IntegerPolynomial::sum_of_coeffs() const {
  BigInt acc(0);
  for (const auto& c : coeffs_) acc += c;
  return acc;
}

IntegerPolynomial& IntegerPolynomial::operator+=(const IntegerPolynomial& other) {
  if (coeffs_.size() < other.coeffs_.size()) coeffs_.resize(other.coeffs_.size(), BigInt(0));
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  normalize();
  return *this;
}

IntegerPolynomial& IntegerPolynomial::operator-=(const IntegerPolynomial& other) {
  if (coeffs_.size() < other.coeffs_.size()) coeffs_.resize(other.coeffs_.size(), BigInt(0));
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  normalize();
  return *this;
}

IntegerPolynomial& IntegerPolynomial::operator*=(const BigInt& scalar) {
  if (scalar == 0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& c : coeffs_) c *= scalar;
  return *this;
}

IntegerPolynomial operator*(const IntegerPolynomial& a, const IntegerPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return IntegerPolynomial{};
  std::vector<BigInt> out(a.coeffs_.size() + b.coeffs_.size() - 1, BigInt(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
      out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  return IntegerPolynomial(std::move(out));
}

void IntegerPolynomial::normalize() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

} // namespace majlab
