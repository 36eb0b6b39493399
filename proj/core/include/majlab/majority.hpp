#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "majlab/errors.hpp"

namespace majlab {

/// An input x in {-1,+1}^d.
class SignVector {
 public:
  explicit SignVector(std::vector<int8_t> bits);
  static SignVector all_positive(unsigned d);
  /// First m entries -1, the rest +1.
  static SignVector first_m_negative(unsigned d, unsigned m);
  /// Decode d bits from a mask; set bit -> -1. Used by exhaustive sweeps.
  static SignVector from_negative_mask(unsigned d, std::uint64_t mask);

  unsigned dim() const { return static_cast<unsigned>(bits_.size()); }
  int operator[](unsigned i) const { return bits_[i]; } // 0-based
  const std::vector<int8_t>& bits() const { return bits_; }
  unsigned count_negative() const;

  bool operator==(const SignVector& other) const = default;

 private:
  std::vector<int8_t> bits_;
};

/// A sorted k-element subset of {1,...,d} (1-based indices).
class Support {
 public:
  Support(std::vector<unsigned> indices, unsigned d);

  unsigned k() const { return static_cast<unsigned>(indices_.size()); }
  unsigned d() const { return d_; }
  const std::vector<unsigned>& indices() const { return indices_; }
  Support complement() const;
  /// Cyclic index shift j -> (j mod d) + 1.
  Support cyclic_shift() const;

  bool operator==(const Support& other) const = default;
  bool operator<(const Support& other) const {
    return indices_ < other.indices_;
  }

 private:
  std::vector<unsigned> indices_;
  unsigned d_;
};

/// Majority over the support: +1 iff the restricted sum is >= 0 (ties win).
int maj(const SignVector& x, const Support& s);

/// Parity over the support: product of the selected entries.
int par(const SignVector& x, const Support& s);

struct LabeledDataset {
  std::vector<SignVector> inputs;
  Support support;
  std::vector<int8_t> labels; // labels[i] = maj(inputs[i], support)
  std::uint64_t seed = 0;

  unsigned d() const { return support.d(); }
  unsigned k() const { return support.k(); }
  std::size_t n() const { return inputs.size(); }
};

/// n i.i.d. uniform sign vectors labeled by the support's majority;
/// deterministic in (seed, sample index) regardless of worker count.
LabeledDataset sample_dataset(unsigned d, unsigned k, std::size_t n,
                              const Support& support, std::uint64_t seed);

using Predictor = std::function<double(const SignVector&)>;

/// (1/n) sum f(x_i) g(x_i) over the dataset inputs.
double empirical_inner(const Predictor& f, const Predictor& g,
                       const LabeledDataset& data);

double empirical_norm_sq(const Predictor& f, const LabeledDataset& data);

/// (1/2n) sum (y_i - f(x_i))^2 against the stored labels.
double empirical_loss(const Predictor& pred, const LabeledDataset& data);

struct MseEstimate {
  double value = 0.0;
  bool exact = true;
  double std_error = 0.0; // 0 in exact mode
  std::size_t samples = 0;
};

/// E_x[(maj(x,S) - f(x))^2], averaged over all 2^d inputs. Requires d <= 20.
MseEstimate population_mse_exact(const Predictor& pred, const Support& s);

/// Monte Carlo estimate with reported standard error.
MseEstimate population_mse_monte_carlo(const Predictor& pred, const Support& s,
                                       std::size_t samples, std::uint64_t seed);

/// min(max(v,-1),1); never increases squared error against +-1 labels.
double clip(double v);

struct ComplementViolation {
  SignVector x;
  Support s;
};

/// Exhaustively tests h_S(x) = x_1...x_d * h_{S^c}(x) over all x and all
/// k-supports; returns every violating pair (empty means the identity
/// holds for this (d,k)).
std::vector<ComplementViolation> complement_identity_check(unsigned d, unsigned k);

// Dataset text format: schema comment, a d,k,seed header line, a support
// line, then one record per sample ("+-+- ... ,+1"). Round trips bit-exactly.
void write_dataset(std::ostream& out, const LabeledDataset& data);
LabeledDataset read_dataset(std::istream& in);
void save_dataset(const std::string& path, const LabeledDataset& data);
LabeledDataset load_dataset(const std::string& path);

} // namespace majlab
