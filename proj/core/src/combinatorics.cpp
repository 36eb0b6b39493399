#include "majlab/combinatorics.hpp"

#include <utility>

#include "majlab/parallel.hpp"

namespace majlab {

BigInt binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return BigInt(0);
  if (k > n - k) k = n - k;
  BigInt result(1);
  for (std::uint64_t i = 1; i <= k; ++i) {
    result *= BigInt(n - k + i);
    result /= BigInt(i); // divides exactly: result is C(n-k+i, i)
  }
  return result;
}

void CountingInstance::validate() const {
  if (m > d) throw DomainError("CountingInstance: m > d");
  if (k > d) throw DomainError("CountingInstance: k > d");
  if (k < 1) throw DomainError("CountingInstance: k < 1");
}

bool CountingInstance::in_lemma_regime() const {
  const unsigned half = k / 2;
  return m >= half && d - m >= half;
}

IntegerPolynomial delta_majority(unsigned m, unsigned k) {
  const unsigned split = k / 2;
  std::vector<BigInt> coeffs(m + 1, BigInt(0));
  for (unsigned j = 0; j <= m; ++j) {
    const BigInt c = binom(m, j);
    coeffs[j] = (j <= split) ? c : -c;
  }
  return IntegerPolynomial(std::move(coeffs));
}

IntegerPolynomial delta_parity(unsigned m) {
  return IntegerPolynomial::one_minus_t_power(m);
}

BigInt count_positive_supports(const CountingInstance& inst) {
  inst.validate();
  BigInt acc(0);
  for (unsigned j = 0; j <= inst.k / 2; ++j) {
    acc += binom(inst.m, j) * binom(inst.d - inst.m, inst.k - j);
  }
  return acc;
}

IdentitySides identity_decomposition(const CountingInstance& inst) {
  inst.validate();
  const IntegerPolynomial gamma = IntegerPolynomial::one_plus_t_power(inst.d - inst.m);
  const IntegerPolynomial delta = delta_majority(inst.m, inst.k);
  const BigInt cross = (gamma * delta).coeff(inst.k);
  const BigInt total = binom(inst.d, inst.k) + cross;
  if (total % 2 != 0) throw ParityError("identity_decomposition: odd numerator");
  return IdentitySides{.lhs = count_positive_supports(inst), .rhs = total / 2};
}

RatioDeviation ratio_deviation(const CountingInstance& inst) {
  inst.validate();
  const BigInt a = count_positive_supports(inst);
  const BigInt c = binom(inst.d, inst.k);
  // A/B - 1 with B = C(d,k)/2, i.e. (2A - C) / C.
  const BigRational signed_value(2 * a - c, c);
  return RatioDeviation{.absolute = boost::multiprecision::abs(signed_value),
                        .signed_value = signed_value};
}

BigRational majority_bias(const CountingInstance& inst) {
  inst.validate();
  const BigInt a = count_positive_supports(inst);
  const BigInt c = binom(inst.d, inst.k);
  return BigRational(2 * a - c, c);
}

namespace {

bool next_combination(std::vector<unsigned>& idx, unsigned d) {
  const unsigned k = static_cast<unsigned>(idx.size());
  for (unsigned i = k; i-- > 0;) {
    if (idx[i] < d - (k - 1 - i)) {
      ++idx[i];
      for (unsigned j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

} // namespace

BigInt brute_force_support_count(const SignVector& x, unsigned k, std::uint64_t cap) {
  const unsigned d = x.dim();
  if (k < 1 || k > d) throw DomainError("brute_force_support_count: need 1 <= k <= d");
  if (binom(d, k) > cap) throw CapExceeded("brute_force_support_count: C(d,k) exceeds cap");
  std::vector<unsigned> idx(k);
  for (unsigned i = 0; i < k; ++i) idx[i] = i + 1;
  BigInt count(0);
  do {
    int sum = 0;
    for (unsigned j : idx) sum += x[j - 1];
    if (sum >= 0) ++count;
  } while (next_combination(idx, d));
  return count;
}

std::vector<DecayRow> ratio_decay_sweep(unsigned d_min, unsigned d_max,
                                        unsigned workers) {
  if (d_min < 2 || d_min > d_max) throw DomainError("ratio_decay_sweep: bad range");
  std::vector<DecayRow> rows(d_max - d_min + 1);
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    const unsigned d = d_min + static_cast<unsigned>(i);
    const CountingInstance inst{.d = d, .k = 2 * (d / 4), .m = d / 2};
    const RatioDeviation dev = ratio_deviation(inst);
    rows[i] = DecayRow{.d = d,
                       .k = inst.k,
                       .m = inst.m,
                       .deviation = dev.absolute,
                       .log_deviation = dev.absolute == 0
                                            ? 0.0
                                            : log_rational(dev.absolute)};
  });
  return rows;
}

double decay_log_slope(const std::vector<DecayRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.deviation == 0) continue;
    const double x = static_cast<double>(r.d);
    const double y = r.log_deviation;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw DomainError("decay_log_slope: need at least two nonzero rows");
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

} // namespace majlab
