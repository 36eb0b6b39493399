#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "majlab/errors.hpp"
#include "majlab/majority.hpp"

namespace majlab {

/// Whether the attention sum at token m consumes the original token values
/// (dummy positions contribute 0) or the already-computed ones.
enum class RecursionMode { raw_tokens, computed_tokens };

std::string to_string(RecursionMode mode);
RecursionMode recursion_mode_from_string(const std::string& s);

struct ModelConfig {
  unsigned d = 0;
  unsigned k = 0;
  RecursionMode recursion = RecursionMode::computed_tokens;

  unsigned ell() const { return d + k - 1; }
  void validate() const;
};

/// Scalar nonlinearity with phi(0) = -1, phi(+-1) = 1, phi'(0) = phi'(+-1) = 0.
struct LinkFunction {
  std::string name;
  double (*phi)(double);
  double (*phi_prime)(double);
};

/// Default link: phi(z) = -cos(pi z).
const LinkFunction& default_link();
/// Lookup by name ("neg_cos_pi", "quartic"); DomainError for unknown names.
const LinkFunction& link_by_name(const std::string& name);

/// Flattening of the trainable entries of W: pairs (j,m), 1-based, with
/// j < m and m > d, in row-major (j outer, m inner) order.
class UnmaskedLayout {
 public:
  explicit UnmaskedLayout(const ModelConfig& cfg);

  std::size_t count() const { return entries_.size(); }
  std::pair<unsigned, unsigned> entry(std::size_t flat) const { return entries_[flat]; }
  const std::vector<std::pair<unsigned, unsigned>>& entries() const { return entries_; }
  /// Flat position of trainable entry (j,m).
  std::size_t flat_index(unsigned j, unsigned m) const {
    return row_offsets_[j] + (m - first_m_[j]);
  }

 private:
  std::vector<std::pair<unsigned, unsigned>> entries_;
  std::vector<std::size_t> row_offsets_; // indexed by j, 1-based
  std::vector<unsigned> first_m_;        // first trainable m in row j
};

/// The ell x ell attention weight matrix. Entries with j >= m or m <= d are
/// inert: the forward pass never reads them.
class TransformerParams {
 public:
  explicit TransformerParams(const ModelConfig& cfg);

  unsigned ell() const { return ell_; }
  double w(unsigned j, unsigned m) const { return w_[(j - 1) * ell_ + (m - 1)]; } // 1-based
  double& w(unsigned j, unsigned m) { return w_[(j - 1) * ell_ + (m - 1)]; }

  std::vector<double> pack(const UnmaskedLayout& layout) const;
  void unpack(const UnmaskedLayout& layout, std::span<const double> flat);

 private:
  unsigned ell_;
  std::vector<double> w_;
};

using GradientVector = std::vector<double>;

/// Softmax over the predecessors of token m (1-based, d+1 <= m <= ell),
/// computed with max subtraction.
std::vector<double> attention_weights(const TransformerParams& params,
                                      const ModelConfig& cfg, unsigned m);

struct ForwardResult {
  double prediction = 0.0;
  std::vector<double> tokens; // length ell; 1..d raw bits, rest computed
};

ForwardResult forward(const TransformerParams& params, const ModelConfig& cfg,
                      const SignVector& x, const LinkFunction& link = default_link());

/// d(prediction)/dw over the unmasked entries, reverse-mode through the
/// token recursion. Matches central finite differences.
GradientVector grad_prediction(const TransformerParams& params, const ModelConfig& cfg,
                               const SignVector& x, const LinkFunction& link = default_link());

/// A differentiable parametric predictor f_theta with an analytic gradient
/// in theta. Both the transformer and the linear probe implement this, so
/// loss and oracle machinery is model-agnostic.
class DifferentiableModel {
 public:
  virtual ~DifferentiableModel() = default;
  virtual std::string name() const = 0;
  virtual std::size_t param_count() const = 0;
  virtual unsigned input_dim() const = 0;
  virtual double predict(std::span<const double> theta, const SignVector& x) const = 0;
  /// Writes d(prediction)/dtheta into grad (size param_count) and returns
  /// the prediction.
  virtual double predict_grad(std::span<const double> theta, const SignVector& x,
                              std::span<double> grad) const = 0;

  Predictor predictor(std::vector<double> theta) const;
};

class TransformerModel final : public DifferentiableModel {
 public:
  TransformerModel(ModelConfig cfg, LinkFunction link = default_link());

  const ModelConfig& config() const { return cfg_; }
  const LinkFunction& link() const { return link_; }
  const UnmaskedLayout& layout() const { return layout_; }

  std::string name() const override { return "transformer"; }
  std::size_t param_count() const override { return layout_.count(); }
  unsigned input_dim() const override { return cfg_.d; }
  double predict(std::span<const double> theta, const SignVector& x) const override;
  double predict_grad(std::span<const double> theta, const SignVector& x,
                      std::span<double> grad) const override;

 private:
  ModelConfig cfg_;
  LinkFunction link_;
  UnmaskedLayout layout_;
};

/// f_theta(x) = <theta, x>, gradient x. The minimal differentiable model.
class LinearProbeModel final : public DifferentiableModel {
 public:
  explicit LinearProbeModel(unsigned d) : d_(d) {}

  std::string name() const override { return "linear"; }
  std::size_t param_count() const override { return d_; }
  unsigned input_dim() const override { return d_; }
  double predict(std::span<const double> theta, const SignVector& x) const override;
  double predict_grad(std::span<const double> theta, const SignVector& x,
                      std::span<double> grad) const override;

 private:
  unsigned d_;
};

/// Analytic gradient of the (1/2n)-scaled empirical loss:
/// (1/n) sum_i (f(x_i) - y_i) grad f(x_i).
GradientVector grad_empirical_loss(const DifferentiableModel& model,
                                   std::span<const double> theta,
                                   const LabeledDataset& data);

enum class InputMode { exhaustive, provided };

/// Max over the given parameter points and inputs of ||grad f_theta(x)||^2.
/// A lower estimate of the true sup; exhaustive mode enumerates all 2^d
/// inputs (d <= 20).
double sup_grad_norm_estimate(const DifferentiableModel& model,
                              std::span<const std::vector<double>> param_points,
                              InputMode input_mode,
                              std::span<const SignVector> inputs = {});

// Checkpoint text format: header (d, k, ell, recursion mode, link name),
// then the unmasked entries in layout order, one shortest-round-trip
// decimal per line. Round trips bit-exactly.
void write_checkpoint(std::ostream& out, const ModelConfig& cfg, const LinkFunction& link,
                      const TransformerParams& params);
struct Checkpoint {
  ModelConfig cfg;
  std::string link_name;
  std::vector<double> theta; // unmasked entries in layout order
};
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const ModelConfig& cfg,
                     const LinkFunction& link, const TransformerParams& params);
Checkpoint load_checkpoint(const std::string& path);

} // namespace majlab
