#include "majlab/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace majlab {

namespace {

double neg_cos_pi(double z) { return -std::cos(std::numbers::pi * z); }
double neg_cos_pi_prime(double z) { return std::numbers::pi * std::sin(std::numbers::pi * z); }

// -2z^4 + 4z^2 - 1: same constraint set as the default, polynomial instead
// of trigonometric.
double quartic(double z) { return -2.0 * z * z * z * z + 4.0 * z * z - 1.0; }
double quartic_prime(double z) { return -8.0 * z * z * z + 8.0 * z; }

const LinkFunction kNegCosPi{"neg_cos_pi", &neg_cos_pi, &neg_cos_pi_prime};
const LinkFunction kQuartic{"quartic", &quartic, &quartic_prime};

} // namespace

std::string to_string(RecursionMode mode) {
  return mode == RecursionMode::raw_tokens ? "raw_tokens" : "computed_tokens";
}

RecursionMode recursion_mode_from_string(const std::string& s) {
  if (s == "raw_tokens" || s == "raw") return RecursionMode::raw_tokens;
  if (s == "computed_tokens" || s == "computed") return RecursionMode::computed_tokens;
  throw DomainError("unknown recursion mode: " + s);
}

void ModelConfig::validate() const {
  if (d < 1) throw DomainError("ModelConfig: d must be >= 1");
  if (k < 1) throw DomainError("ModelConfig: k must be >= 1");
}

const LinkFunction& default_link() { return kNegCosPi; }

const LinkFunction& link_by_name(const std::string& name) {
  if (name == kNegCosPi.name) return kNegCosPi;
  if (name == kQuartic.name) return kQuartic;
  throw DomainError("unknown link function: " + name);
}

UnmaskedLayout::UnmaskedLayout(const ModelConfig& cfg) {
  cfg.validate();
  const unsigned ell = cfg.ell();
  row_offsets_.assign(ell + 1, 0);
  first_m_.assign(ell + 1, 0);
  for (unsigned j = 1; j <= ell; ++j) {
    row_offsets_[j] = entries_.size();
    first_m_[j] = std::max(cfg.d + 1, j + 1);
    for (unsigned m = first_m_[j]; m <= ell; ++m) {
      entries_.emplace_back(j, m);
    }
  }
}

TransformerParams::TransformerParams(const ModelConfig& cfg)
    : ell_(cfg.ell()), w_(static_cast<std::size_t>(ell_) * ell_, 0.0) {}

std::vector<double> TransformerParams::pack(const UnmaskedLayout& layout) const {
  std::vector<double> flat(layout.count());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const auto [j, m] = layout.entry(i);
    flat[i] = w(j, m);
  }
  return flat;
}

void TransformerParams::unpack(const UnmaskedLayout& layout, std::span<const double> flat) {
  if (flat.size() != layout.count())
    throw DimensionMismatch("TransformerParams::unpack: wrong parameter count");
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const auto [j, m] = layout.entry(i);
    w(j, m) = flat[i];
  }
}

namespace {

// Softmax over w(1..m-1, m) with max subtraction; writes into out[0..m-2].
void softmax_column(const TransformerParams& params, unsigned m, std::span<double> out) {
  double wmax = -std::numeric_limits<double>::infinity();
  for (unsigned j = 1; j < m; ++j) wmax = std::max(wmax, params.w(j, m));
  double denom = 0.0;
  for (unsigned j = 1; j < m; ++j) {
    out[j - 1] = std::exp(params.w(j, m) - wmax);
    denom += out[j - 1];
  }
  for (unsigned j = 1; j < m; ++j) out[j - 1] /= denom;
}

} // namespace

std::vector<double> attention_weights(const TransformerParams& params,
                                      const ModelConfig& cfg, unsigned m) {
  cfg.validate();
  if (m <= cfg.d || m > cfg.ell())
    throw IndexError("attention_weights: token index outside (d, ell]");
  std::vector<double> out(m - 1);
  softmax_column(params, m, out);
  return out;
}

ForwardResult forward(const TransformerParams& params, const ModelConfig& cfg,
                      const SignVector& x, const LinkFunction& link) {
  cfg.validate();
  if (x.dim() != cfg.d) throw DimensionMismatch("forward: input dimension != d");
  const unsigned ell = cfg.ell();
  ForwardResult result;
  result.tokens.resize(ell);
  for (unsigned j = 0; j < cfg.d; ++j) result.tokens[j] = static_cast<double>(x[j]);
  std::vector<double> sigma(ell);
  for (unsigned m = cfg.d + 1; m <= ell; ++m) {
    softmax_column(params, m, sigma);
    double z = 0.0;
    for (unsigned j = 1; j < m; ++j) {
      const double tok = (cfg.recursion == RecursionMode::computed_tokens)
                             ? result.tokens[j - 1]
                             : (j <= cfg.d ? result.tokens[j - 1] : 0.0);
      z += sigma[j - 1] * tok;
    }
    result.tokens[m - 1] = link.phi(z);
  }
  result.prediction = result.tokens[ell - 1];
  return result;
}

namespace {

// Attention weight read for the packed representation: masked entries are 0.
inline double theta_w(std::span<const double> theta, const UnmaskedLayout& layout,
                      unsigned d, unsigned j, unsigned m) {
  return (j < m && m > d) ? theta[layout.flat_index(j, m)] : 0.0;
}

// Softmax over theta entries of column m, max-subtracted.
void softmax_column_theta(std::span<const double> theta, const UnmaskedLayout& layout,
                          unsigned d, unsigned m, std::span<double> out) {
  double wmax = -std::numeric_limits<double>::infinity();
  for (unsigned j = 1; j < m; ++j) wmax = std::max(wmax, theta_w(theta, layout, d, j, m));
  double denom = 0.0;
  for (unsigned j = 1; j < m; ++j) {
    out[j - 1] = std::exp(theta_w(theta, layout, d, j, m) - wmax);
    denom += out[j - 1];
  }
  for (unsigned j = 1; j < m; ++j) out[j - 1] /= denom;
}

// Shared forward + optional reverse pass over the packed parameters.
// Scratch buffers are caller-provided so batch loops do not allocate.
struct TransformerScratch {
  std::vector<double> tokens;
  std::vector<double> zs;
  std::vector<double> sigmas;     // columns d+1..ell packed back to back
  std::vector<double> grad_token;
};

double transformer_eval(std::span<const double> theta, const ModelConfig& cfg,
                        const LinkFunction& link, const UnmaskedLayout& layout,
                        const SignVector& x, std::span<double> grad,
                        TransformerScratch& scratch) {
  const unsigned ell = cfg.ell();
  const unsigned d = cfg.d;
  const bool computed = cfg.recursion == RecursionMode::computed_tokens;
  const bool want_grad = !grad.empty();

  auto& tokens = scratch.tokens;
  auto& zs = scratch.zs;
  auto& sigmas = scratch.sigmas;
  tokens.resize(ell);
  zs.assign(ell + 1, 0.0);
  sigmas.resize(static_cast<std::size_t>(ell) * ell);
  for (unsigned j = 0; j < d; ++j) tokens[j] = static_cast<double>(x[j]);

  for (unsigned m = d + 1; m <= ell; ++m) {
    const std::span<double> sigma(sigmas.data() + static_cast<std::size_t>(m) * (m - 1) / 2, m - 1);
    softmax_column_theta(theta, layout, d, m, sigma);
    double z = 0.0;
    for (unsigned j = 1; j < m; ++j) {
      const double tok = computed ? tokens[j - 1] : (j <= d ? tokens[j - 1] : 0.0);
      z += sigma[j - 1] * tok;
    }
    zs[m] = z;
    tokens[m - 1] = link.phi(z);
  }
  const double prediction = tokens[ell - 1];
  if (!want_grad) return prediction;

  std::fill(grad.begin(), grad.end(), 0.0);
  if (ell == d) return prediction; // k = 1: no computed tokens, no parameters

  // grad_token[m] = d(prediction)/d(token m), accumulated top-down.
  auto& grad_token = scratch.grad_token;
  grad_token.assign(ell + 1, 0.0);
  grad_token[ell] = 1.0;
  for (unsigned m = ell; m > d; --m) {
    const double gbar = grad_token[m];
    if (gbar == 0.0) continue;
    const double coef = gbar * link.phi_prime(zs[m]);
    const std::span<const double> sigma(sigmas.data() + static_cast<std::size_t>(m) * (m - 1) / 2, m - 1);
    for (unsigned j = 1; j < m; ++j) {
      const double tok = computed ? tokens[j - 1] : (j <= d ? tokens[j - 1] : 0.0);
      grad[layout.flat_index(j, m)] += coef * sigma[j - 1] * (tok - zs[m]);
    }
    if (computed) {
      for (unsigned p = d + 1; p < m; ++p) {
        grad_token[p] += coef * sigma[p - 1];
      }
    }
  }
  return prediction;
}

} // namespace

GradientVector grad_prediction(const TransformerParams& params, const ModelConfig& cfg,
                               const SignVector& x, const LinkFunction& link) {
  cfg.validate();
  if (x.dim() != cfg.d) throw DimensionMismatch("grad_prediction: input dimension != d");
  const UnmaskedLayout layout(cfg);
  GradientVector grad(layout.count());
  TransformerScratch scratch;
  transformer_eval(params.pack(layout), cfg, link, layout, x, grad, scratch);
  return grad;
}

Predictor DifferentiableModel::predictor(std::vector<double> theta) const {
  if (theta.size() != param_count())
    throw DimensionMismatch("predictor: wrong parameter count");
  return [this, theta = std::move(theta)](const SignVector& x) {
    return predict(theta, x);
  };
}

TransformerModel::TransformerModel(ModelConfig cfg, LinkFunction link)
    : cfg_(cfg), link_(std::move(link)), layout_(cfg) {
  cfg_.validate();
}

double TransformerModel::predict(std::span<const double> theta, const SignVector& x) const {
  if (x.dim() != cfg_.d) throw DimensionMismatch("predict: input dimension != d");
  if (theta.size() != layout_.count())
    throw DimensionMismatch("predict: wrong parameter count");
  thread_local TransformerScratch scratch;
  return transformer_eval(theta, cfg_, link_, layout_, x, {}, scratch);
}

double TransformerModel::predict_grad(std::span<const double> theta, const SignVector& x,
                                      std::span<double> grad) const {
  if (x.dim() != cfg_.d) throw DimensionMismatch("predict_grad: input dimension != d");
  if (theta.size() != layout_.count())
    throw DimensionMismatch("predict_grad: wrong parameter count");
  if (grad.size() != layout_.count())
    throw DimensionMismatch("predict_grad: wrong gradient size");
  thread_local TransformerScratch scratch;
  return transformer_eval(theta, cfg_, link_, layout_, x, grad, scratch);
}

double LinearProbeModel::predict(std::span<const double> theta, const SignVector& x) const {
  if (x.dim() != d_ || theta.size() != d_)
    throw DimensionMismatch("LinearProbeModel::predict: dimension mismatch");
  double acc = 0.0;
  for (unsigned j = 0; j < d_; ++j) acc += theta[j] * x[j];
  return acc;
}

double LinearProbeModel::predict_grad(std::span<const double> theta, const SignVector& x,
                                      std::span<double> grad) const {
  if (grad.size() != d_) throw DimensionMismatch("LinearProbeModel: wrong gradient size");
  for (unsigned j = 0; j < d_; ++j) grad[j] = static_cast<double>(x[j]);
  return predict(theta, x);
}

GradientVector grad_empirical_loss(const DifferentiableModel& model,
                                   std::span<const double> theta,
                                   const LabeledDataset& data) {
  const std::size_t p = model.param_count();
  GradientVector total(p, 0.0);
  GradientVector g(p);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double pred = model.predict_grad(theta, data.inputs[i], g);
    const double resid = pred - static_cast<double>(data.labels[i]);
    for (std::size_t j = 0; j < p; ++j) total[j] += resid * g[j];
  }
  const double inv_n = 1.0 / static_cast<double>(data.n());
  for (double& v : total) v *= inv_n;
  return total;
}

double sup_grad_norm_estimate(const DifferentiableModel& model,
                              std::span<const std::vector<double>> param_points,
                              InputMode input_mode,
                              std::span<const SignVector> inputs) {
  if (param_points.empty())
    throw DomainError("sup_grad_norm_estimate: need at least one parameter point");
  if (input_mode == InputMode::provided && inputs.empty())
    throw DomainError("sup_grad_norm_estimate: no inputs provided");
  const unsigned d = model.input_dim();
  if (input_mode == InputMode::exhaustive && d > 20)
    throw ExactTooLarge("sup_grad_norm_estimate: exhaustive inputs need d <= 20");

  GradientVector g(model.param_count());
  double best = 0.0;
  auto visit = [&](const SignVector& x) {
    for (const auto& theta : param_points) {
      model.predict_grad(theta, x, g);
      double norm_sq = 0.0;
      for (double v : g) norm_sq += v * v;
      best = std::max(best, norm_sq);
    }
  };
  if (input_mode == InputMode::exhaustive) {
    for (std::uint64_t mask = 0; mask < (1ULL << d); ++mask) {
      visit(SignVector::from_negative_mask(d, mask));
    }
  } else {
    for (const auto& x : inputs) visit(x);
  }
  return best;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw DomainError("checkpoint: bad numeric literal: " + s);
  return v;
}

} // namespace

void write_checkpoint(std::ostream& out, const ModelConfig& cfg, const LinkFunction& link,
                      const TransformerParams& params) {
  out << "majlab-checkpoint v1\n";
  out << "d=" << cfg.d << " k=" << cfg.k << " ell=" << cfg.ell()
      << " recursion=" << to_string(cfg.recursion) << " link=" << link.name << "\n";
  const UnmaskedLayout layout(cfg);
  for (double v : params.pack(layout)) out << format_double(v) << "\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "majlab-checkpoint v1")
    throw DomainError("checkpoint: bad magic line");
  if (!std::getline(in, line)) throw DomainError("checkpoint: missing header");
  Checkpoint cp;
  unsigned ell = 0;
  {
    std::istringstream hs(line);
    std::string field;
    while (hs >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw DomainError("checkpoint: malformed header field");
      const std::string key = field.substr(0, eq);
      const std::string val = field.substr(eq + 1);
      if (key == "d") {
        cp.cfg.d = static_cast<unsigned>(std::stoul(val));
      } else if (key == "k") {
        cp.cfg.k = static_cast<unsigned>(std::stoul(val));
      } else if (key == "ell") {
        ell = static_cast<unsigned>(std::stoul(val));
      } else if (key == "recursion") {
        cp.cfg.recursion = recursion_mode_from_string(val);
      } else if (key == "link") {
        cp.link_name = val;
      } else {
        throw DomainError("checkpoint: unknown header field " + key);
      }
    }
  }
  cp.cfg.validate();
  if (ell != cp.cfg.ell()) throw DomainError("checkpoint: ell != d + k - 1");
  link_by_name(cp.link_name); // validates
  const UnmaskedLayout layout(cp.cfg);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    cp.theta.push_back(parse_double(line));
  }
  if (cp.theta.size() != layout.count())
    throw DomainError("checkpoint: wrong number of entries");
  return cp;
}

void save_checkpoint(const std::string& path, const ModelConfig& cfg,
                     const LinkFunction& link, const TransformerParams& params) {
  std::ostringstream buf;
  write_checkpoint(buf, cfg, link, params);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("save_checkpoint: cannot open " + path);
  f << buf.str();
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("load_checkpoint: cannot open " + path);
  return read_checkpoint(f);
}

} // namespace majlab
