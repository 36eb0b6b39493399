#include "majlab/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

#include "majlab/combinatorics.hpp"
#include "majlab/parallel.hpp"
#include "majlab/rng.hpp"

namespace majlab {

namespace {

using MatrixMap = Eigen::Map<const Eigen::MatrixXd>;

} // namespace

SupportFamily enumerate_supports(unsigned d, unsigned k, std::uint64_t cap) {
  if (k < 1 || k > d) throw DomainError("enumerate_supports: need 1 <= k <= d");
  if (binom(d, k) > cap) throw CapExceeded("enumerate_supports: C(d,k) exceeds cap");
  SupportFamily family{.supports = {}, .exhaustive = true, .d = d, .k = k};
  std::vector<unsigned> idx(k);
  for (unsigned i = 0; i < k; ++i) idx[i] = i + 1;
  while (true) {
    family.supports.emplace_back(idx, d);
    // next lexicographic combination
    unsigned i = k;
    while (i-- > 0) {
      if (idx[i] < d - (k - 1 - i)) {
        ++idx[i];
        for (unsigned j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return family;
    }
  }
}

SupportFamily sample_supports(unsigned d, unsigned k, std::size_t count,
                              std::uint64_t seed) {
  if (k < 1 || k > d) throw DomainError("sample_supports: need 1 <= k <= d");
  if (count < 1) throw DomainError("sample_supports: count must be >= 1");
  if (BigInt(count) > binom(d, k))
    throw DomainError("sample_supports: count exceeds C(d,k)");
  CounterRng rng(seed, CounterRng::kFamilySample);
  std::set<std::vector<unsigned>> seen;
  std::vector<unsigned> pool(d);
  while (seen.size() < count) {
    for (unsigned i = 0; i < d; ++i) pool[i] = i + 1;
    // partial Fisher-Yates: first k entries become the subset
    for (unsigned i = 0; i < k; ++i) {
      const unsigned j = i + static_cast<unsigned>(rng.next_below(d - i));
      std::swap(pool[i], pool[j]);
    }
    std::vector<unsigned> subset(pool.begin(), pool.begin() + k);
    std::sort(subset.begin(), subset.end());
    seen.insert(std::move(subset));
  }
  SupportFamily family{.supports = {}, .exhaustive = false, .d = d, .k = k};
  family.supports.reserve(count);
  for (const auto& idx : seen) family.supports.emplace_back(idx, d);
  return family;
}

FamilyLabels compute_family_labels(const SupportFamily& family,
                                   std::span<const SignVector> inputs,
                                   unsigned workers) {
  const std::size_t n = inputs.size();
  const std::size_t count = family.size();
  if (n == 0) throw DomainError("compute_family_labels: empty input set");
  FamilyLabels labels{.n = n, .count = count, .h = {}, .mean = {}, .exact_mean = false};
  labels.h.resize(n * count);
  parallel_for(count, workers, [&](std::size_t s) {
    const auto& idx = family.supports[s].indices();
    int8_t* col = labels.h.data() + s * n;
    for (std::size_t i = 0; i < n; ++i) {
      int sum = 0;
      for (unsigned j : idx) sum += inputs[i][j - 1];
      col[i] = sum >= 0 ? 1 : -1;
    }
  });
  labels.mean.resize(n);
  if (family.exhaustive) {
    // Exact per-input mean from the counting identity, memoized over m.
    std::vector<double> bias_by_m(family.d + 1);
    for (unsigned m = 0; m <= family.d; ++m) {
      bias_by_m[m] = to_double(
          majority_bias(CountingInstance{.d = family.d, .k = family.k, .m = m}));
    }
    for (std::size_t i = 0; i < n; ++i) {
      labels.mean[i] = bias_by_m[inputs[i].count_negative()];
    }
    labels.exact_mean = true;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      long sum = 0;
      for (std::size_t s = 0; s < count; ++s) sum += labels.h[s * n + i];
      labels.mean[i] = static_cast<double>(sum) / static_cast<double>(count);
    }
  }
  return labels;
}

BatchEval batch_eval(const DifferentiableModel& model, std::span<const double> theta,
                     std::span<const SignVector> inputs, unsigned workers) {
  BatchEval eval{.n = inputs.size(), .dim = model.param_count(), .preds = {}, .grads = {}};
  eval.preds.resize(eval.n);
  eval.grads.resize(eval.n * eval.dim);
  parallel_for(eval.n, workers, [&](std::size_t i) {
    std::span<double> g(eval.grads.data() + i * eval.dim, eval.dim);
    eval.preds[i] = model.predict_grad(theta, inputs[i], g);
  });
  return eval;
}

std::vector<double> deviation_norms(const BatchEval& eval, const FamilyLabels& labels,
                                    unsigned workers) {
  if (eval.n != labels.n) throw DimensionMismatch("deviation_norms: input count mismatch");
  const std::size_t n = eval.n;
  const std::size_t dim = eval.dim;
  const std::size_t count = labels.count;
  std::vector<double> devs(count, 0.0);
  if (dim == 0 || count == 0) return devs;

  const MatrixMap grads(eval.grads.data(), static_cast<Eigen::Index>(dim),
                        static_cast<Eigen::Index>(n));
  const Eigen::Map<const Eigen::VectorXd> mean_labels(labels.mean.data(),
                                                      static_cast<Eigen::Index>(n));
  const Eigen::VectorXd mean_proj = grads * mean_labels; // G * hbar

  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(lo + kBlock, count);
    const std::size_t width = hi - lo;
    Eigen::MatrixXd h_block(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
    for (std::size_t s = lo; s < hi; ++s) {
      const int8_t* col = labels.h.data() + s * n;
      double* out = h_block.col(static_cast<Eigen::Index>(s - lo)).data();
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(col[i]);
    }
    const Eigen::MatrixXd proj = grads * h_block; // dim x width
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t s = lo; s < hi; ++s) {
      devs[s] = (mean_proj - proj.col(static_cast<Eigen::Index>(s - lo))).norm() * inv_n;
    }
  });
  return devs;
}

namespace {

// grad L_{n,S} for the column of labels h, given a batch evaluation:
// (1/n) sum_i (f_i - h_i) g_i.
GradientVector loss_gradient_from_eval(const BatchEval& eval, std::span<const int8_t> h) {
  GradientVector out(eval.dim, 0.0);
  for (std::size_t i = 0; i < eval.n; ++i) {
    const double c = eval.preds[i] - static_cast<double>(h[i]);
    const double* g = eval.grads.data() + i * eval.dim;
    for (std::size_t j = 0; j < eval.dim; ++j) out[j] += c * g[j];
  }
  const double inv_n = 1.0 / static_cast<double>(eval.n);
  for (double& v : out) v *= inv_n;
  return out;
}

GradientVector mean_gradient_from_eval(const BatchEval& eval, const FamilyLabels& labels) {
  GradientVector out(eval.dim, 0.0);
  for (std::size_t i = 0; i < eval.n; ++i) {
    const double c = eval.preds[i] - labels.mean[i];
    const double* g = eval.grads.data() + i * eval.dim;
    for (std::size_t j = 0; j < eval.dim; ++j) out[j] += c * g[j];
  }
  const double inv_n = 1.0 / static_cast<double>(eval.n);
  for (double& v : out) v *= inv_n;
  return out;
}

} // namespace

MeanGradientResult mean_gradient(const DifferentiableModel& model,
                                 std::span<const double> theta,
                                 const SupportFamily& family,
                                 std::span<const SignVector> inputs,
                                 unsigned workers) {
  const BatchEval eval = batch_eval(model, theta, inputs, workers);
  const FamilyLabels labels = compute_family_labels(family, inputs, workers);
  MeanGradientResult result{.value = mean_gradient_from_eval(eval, labels),
                            .exact = family.exhaustive,
                            .std_error = 0.0};
  if (!family.exhaustive) {
    const std::vector<double> devs = deviation_norms(eval, labels, workers);
    double var = 0.0;
    for (double v : devs) var += v * v;
    var /= static_cast<double>(devs.size());
    result.std_error = std::sqrt(var / static_cast<double>(devs.size()));
  }
  return result;
}

double gradient_variance(const DifferentiableModel& model,
                         std::span<const double> theta,
                         const SupportFamily& family,
                         std::span<const SignVector> inputs,
                         unsigned workers) {
  const BatchEval eval = batch_eval(model, theta, inputs, workers);
  const FamilyLabels labels = compute_family_labels(family, inputs, workers);
  const std::vector<double> devs = deviation_norms(eval, labels, workers);
  double acc = 0.0;
  for (double v : devs) acc += v * v;
  return acc / static_cast<double>(devs.size());
}

double variance_bound(unsigned d, std::size_t n, double sup_sq) {
  if (n == 0) throw DomainError("variance_bound: n must be >= 1");
  return 2.0 * std::sqrt(static_cast<double>(d) / static_cast<double>(n)) * sup_sq;
}

GramMatrix gram_matrix(const SupportFamily& family, std::span<const SignVector> inputs,
                       std::size_t cap, unsigned workers) {
  const std::size_t count = family.size();
  if (count > cap) throw SizeExceeded("gram_matrix: family too large for dense Gram");
  const std::size_t n = inputs.size();
  if (n == 0) throw DomainError("gram_matrix: empty input set");
  const FamilyLabels labels = compute_family_labels(family, inputs, workers);
  GramMatrix gram{.size = count, .values = std::vector<double>(count * count, 0.0)};
  parallel_for(count, workers, [&](std::size_t a) {
    const int8_t* ha = labels.h.data() + a * n;
    for (std::size_t b = a; b < count; ++b) {
      const int8_t* hb = labels.h.data() + b * n;
      long dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += static_cast<int>(ha[i]) * hb[i];
      const double v = static_cast<double>(dot) / static_cast<double>(n);
      gram.values[a * count + b] = v;
      gram.values[b * count + a] = v;
    }
  });
  return gram;
}

double lambda_max(const GramMatrix& gram, double tol) {
  const std::size_t n = gram.size;
  if (n == 0) throw DomainError("lambda_max: empty matrix");
  if (tol <= 0) throw DomainError("lambda_max: tol must be positive");
  const Eigen::Map<const Eigen::MatrixXd> mat(gram.values.data(),
                                              static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
  constexpr int kMaxIters = 200000;
  const double tiny = 1e-14;

  auto iterate_from = [&](Eigen::VectorXd v) -> std::optional<double> {
    double norm = v.norm();
    if (norm < tiny) return std::nullopt;
    v /= norm;
    double lambda = 0.0;
    for (int it = 0; it < kMaxIters; ++it) {
      Eigen::VectorXd w = mat * v;
      const double wnorm = w.norm();
      if (wnorm < tiny) return std::nullopt; // start orthogonal to range
      const double next = v.dot(w);
      w /= wnorm;
      if (it > 0 && std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
        return next;
      }
      lambda = next;
      v = std::move(w);
    }
    return lambda;
  };

  // All-ones start, then canonical basis fallbacks when it degenerates.
  if (auto r = iterate_from(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)))) {
    return *r;
  }
  double best = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    e[static_cast<Eigen::Index>(i)] = 1.0;
    if (auto r = iterate_from(std::move(e))) {
      best = std::max(best, *r);
      found = true;
      if (best > 0) break; // PSD with unit diagonal: first success suffices
    }
  }
  if (!found) throw DomainError("lambda_max: power iteration failed from every start");
  return best;
}

FrameCheck partial_frame_check(const SupportFamily& family,
                               std::span<const SignVector> inputs,
                               const Predictor& f,
                               std::size_t cap, unsigned workers) {
  const std::size_t n = inputs.size();
  if (n == 0) throw DomainError("partial_frame_check: empty input set");
  const GramMatrix gram = gram_matrix(family, inputs, cap, workers);
  const FamilyLabels labels = compute_family_labels(family, inputs, workers);
  std::vector<double> fx(n);
  for (std::size_t i = 0; i < n; ++i) fx[i] = f(inputs[i]);
  double norm_sq = 0.0;
  for (double v : fx) norm_sq += v * v;
  norm_sq /= static_cast<double>(n);
  double lhs = 0.0;
  for (std::size_t s = 0; s < family.size(); ++s) {
    const int8_t* h = labels.h.data() + s * n;
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) inner += fx[i] * h[i];
    inner /= static_cast<double>(n);
    lhs += inner * inner;
  }
  return FrameCheck{.lhs = lhs, .rhs = lambda_max(gram) * norm_sq};
}

std::string to_string(OracleDirection dir) {
  return dir == OracleDirection::hide_when_close ? "hide_when_close" : "paper_literal";
}

OracleDirection oracle_direction_from_string(const std::string& s) {
  if (s == "hide_when_close") return OracleDirection::hide_when_close;
  if (s == "paper_literal") return OracleDirection::paper_literal;
  throw DomainError("unknown oracle direction: " + s);
}

void OracleConfig::validate() const {
  if (!(epsilon >= 0)) throw DomainError("OracleConfig: epsilon must be >= 0");
}

bool oracle_takes_mean_branch(double deviation, const OracleConfig& cfg) {
  if (cfg.direction == OracleDirection::hide_when_close) {
    return deviation <= cfg.epsilon;
  }
  return deviation >= cfg.epsilon;
}

OracleAnswer oracle_query(const DifferentiableModel& model, std::span<const double> theta,
                          const Support& s, const SupportFamily& family,
                          std::span<const SignVector> inputs, const OracleConfig& cfg,
                          unsigned workers) {
  cfg.validate();
  const BatchEval eval = batch_eval(model, theta, inputs, workers);
  const FamilyLabels labels = compute_family_labels(family, inputs, workers);
  std::vector<int8_t> h(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    h[i] = static_cast<int8_t>(maj(inputs[i], s));
  }
  const GradientVector true_grad = loss_gradient_from_eval(eval, h);
  const GradientVector mean_grad = mean_gradient_from_eval(eval, labels);
  double dev_sq = 0.0;
  for (std::size_t j = 0; j < true_grad.size(); ++j) {
    const double diff = true_grad[j] - mean_grad[j];
    dev_sq += diff * diff;
  }
  const double dev = std::sqrt(dev_sq);
  const bool take_mean = oracle_takes_mean_branch(dev, cfg);
  return OracleAnswer{.gradient = take_mean ? mean_grad : true_grad,
                      .mean_branch = take_mean,
                      .deviation = dev};
}

TrajectoryRecord run_mean_trajectory(const DifferentiableModel& model,
                                     std::vector<double> theta0,
                                     const SupportFamily& family,
                                     std::span<const SignVector> inputs,
                                     unsigned T, double lr,
                                     bool record_deviations,
                                     unsigned workers) {
  if (theta0.size() != model.param_count())
    throw DimensionMismatch("run_mean_trajectory: wrong parameter count");
  const FamilyLabels labels = compute_family_labels(family, inputs, workers);
  TrajectoryRecord record{.thetas = {}, .mean_gradients = {}, .lr = lr, .T = T,
                          .deviations = {}};
  record.thetas.reserve(T + 1);
  record.mean_gradients.reserve(T + 1);
  std::vector<double> theta = std::move(theta0);
  for (unsigned t = 0; t <= T; ++t) {
    const BatchEval eval = batch_eval(model, theta, inputs, workers);
    GradientVector mean_grad = mean_gradient_from_eval(eval, labels);
    if (record_deviations) {
      record.deviations.push_back(deviation_norms(eval, labels, workers));
    }
    record.thetas.push_back(theta);
    record.mean_gradients.push_back(mean_grad);
    if (t < T) {
      for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= lr * mean_grad[j];
    }
  }
  return record;
}

QResult compute_q(const TrajectoryRecord& traj, const SupportFamily& family,
                  double epsilon) {
  if (!(epsilon >= 0)) throw DomainError("compute_q: epsilon must be >= 0");
  if (traj.deviations.size() != traj.thetas.size())
    throw DomainError("compute_q: trajectory lacks recorded deviations");
  QResult q;
  for (std::size_t s = 0; s < family.size(); ++s) {
    bool inside = true;
    for (const auto& step : traj.deviations) {
      if (!(step[s] <= epsilon)) {
        inside = false;
        break;
      }
    }
    if (inside) q.members.push_back(s);
  }
  q.probability = static_cast<double>(q.members.size()) /
                  static_cast<double>(family.size());
  return q;
}

ProbabilityBound q_probability_bound(unsigned T, double epsilon, unsigned d,
                                     std::size_t n, double sup_sq) {
  if (epsilon == 0) throw DivisionByZero("q_probability_bound: epsilon = 0");
  if (!(epsilon > 0)) throw DomainError("q_probability_bound: epsilon must be positive");
  if (n == 0) throw DomainError("q_probability_bound: n must be >= 1");
  const double value = 1.0 - (2.0 * T / (epsilon * epsilon)) *
                                 std::sqrt(static_cast<double>(d) / static_cast<double>(n)) *
                                 sup_sq;
  return ProbabilityBound{.value = value,
                          .clamped = std::max(value, 0.0),
                          .vacuous = value <= 0.0};
}

double linf_error(const Predictor& pred, const SupportFamily& family,
                  unsigned workers) {
  const unsigned d = family.d;
  if (d > 16) throw ExactTooLarge("linf_error: exhaustive sup needs d <= 16");
  const std::uint64_t total = 1ULL << d;
  std::vector<double> fx(total);
  parallel_for(total, workers, [&](std::size_t mask) {
    fx[mask] = pred(SignVector::from_negative_mask(d, static_cast<std::uint64_t>(mask)));
  });
  const unsigned half = family.k / 2;
  std::vector<double> sups(family.size());
  parallel_for(family.size(), workers, [&](std::size_t s) {
    std::uint64_t smask = 0;
    for (unsigned j : family.supports[s].indices()) smask |= 1ULL << (j - 1);
    double sup = 0.0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      // negatives chosen inside the support decide the majority sign
      const unsigned c = static_cast<unsigned>(__builtin_popcountll(mask & smask));
      const double target = c <= half ? 1.0 : -1.0;
      sup = std::max(sup, std::abs(target - fx[mask]));
    }
    sups[s] = sup;
  });
  double acc = 0.0;
  for (double v : sups) acc += v;
  return acc / static_cast<double>(family.size());
}

AutomorphismReport shift_automorphism_report(const SupportFamily& family,
                                             const std::vector<std::size_t>& q_members) {
  AutomorphismReport report{.has_fixed_point = false, .maps_q_into_q = true,
                            .q_size = q_members.size()};
  // Locate shifted supports by binary search; enumerate_supports is sorted,
  // sampled families are kept sorted as well.
  auto find_index = [&](const Support& s) -> std::optional<std::size_t> {
    const auto it = std::lower_bound(
        family.supports.begin(), family.supports.end(), s,
        [](const Support& a, const Support& b) { return a < b; });
    if (it != family.supports.end() && *it == s) {
      return static_cast<std::size_t>(it - family.supports.begin());
    }
    return std::nullopt;
  };
  std::vector<char> in_q(family.size(), 0);
  for (std::size_t s : q_members) in_q[s] = 1;
  for (std::size_t s = 0; s < family.size(); ++s) {
    const Support shifted = family.supports[s].cyclic_shift();
    if (shifted == family.supports[s]) report.has_fixed_point = true;
    if (in_q[s]) {
      const auto target = find_index(shifted);
      if (!target || !in_q[*target]) report.maps_q_into_q = false;
    }
  }
  return report;
}

} // namespace majlab
