#pragma once

#include <cstdint>
#include <vector>

#include "majlab/bigint.hpp"
#include "majlab/majority.hpp"
#include "majlab/polynomial.hpp"

namespace majlab {

/// Exact C(n,k); k > n gives 0.
BigInt binom(std::uint64_t n, std::uint64_t k);

/// A counting problem instance: dimension d, support size k, and the
/// number m of -1 entries in the input.
struct CountingInstance {
  unsigned d = 0;
  unsigned k = 0;
  unsigned m = 0;

  void validate() const;
  /// The regime where the counting lemma asserts its identity:
  /// d >= m >= floor(k/2) and d - m >= floor(k/2).
  bool in_lemma_regime() const;
};

/// Signed truncation of (1+t)^m at split index floor(k/2):
/// +C(m,j) t^j for j <= floor(k/2), -C(m,j) t^j above.
IntegerPolynomial delta_majority(unsigned m, unsigned k);

/// Coefficients of (1-t)^m, the parity-problem analogue.
IntegerPolynomial delta_parity(unsigned m);

/// Number of k-supports on which the majority of an input with m negative
/// entries is +1: sum_{j=0}^{floor(k/2)} C(m,j) C(d-m,k-j).
BigInt count_positive_supports(const CountingInstance& inst);

struct IdentitySides {
  BigInt lhs; // direct count
  BigInt rhs; // (C(d,k) + Coeff_k[(1+t)^{d-m} * delta_majority]) / 2
};

/// Both sides of the counting identity, for exact comparison. The halving
/// on the rhs must be exact; an odd sum raises ParityError (a bug guard).
IdentitySides identity_decomposition(const CountingInstance& inst);

struct RatioDeviation {
  BigRational absolute;     // |A/B - 1|
  BigRational signed_value; // A/B - 1
};

/// Deviation of A from B = C(d,k)/2 as an exact rational.
RatioDeviation ratio_deviation(const CountingInstance& inst);

/// E_{S in S}[maj(x,S)] = (2A - C(d,k)) / C(d,k) for any x with m
/// negative entries; equals the signed ratio deviation.
BigRational majority_bias(const CountingInstance& inst);

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Independent oracle: enumerates every k-subset and counts maj = +1.
BigInt brute_force_support_count(const SignVector& x, unsigned k,
                                 std::uint64_t cap = kDefaultEnumerationCap);

struct DecayRow {
  unsigned d = 0;
  unsigned k = 0;
  unsigned m = 0;
  BigRational deviation;
  double log_deviation = 0.0;
};

/// The deviation sweep d in [d_min, d_max] with k = 2*floor(d/4),
/// m = floor(d/2); exact rationals, log taken only for reporting.
std::vector<DecayRow> ratio_decay_sweep(unsigned d_min, unsigned d_max,
                                        unsigned workers = 1);

/// Least-squares slope of log(deviation) against d; rows with deviation 0
/// are excluded.
double decay_log_slope(const std::vector<DecayRow>& rows);

} // namespace majlab
