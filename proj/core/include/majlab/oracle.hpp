#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "majlab/majority.hpp"
#include "majlab/model.hpp"

namespace majlab {

/// The family S of candidate supports the oracle averages over.
struct SupportFamily {
  std::vector<Support> supports;
  bool exhaustive = false;
  unsigned d = 0;
  unsigned k = 0;

  std::size_t size() const { return supports.size(); }
};

inline constexpr std::uint64_t kDefaultFamilyCap = 1'000'000;

/// All k-subsets of [d] in lexicographic order; CapExceeded if C(d,k)
/// exceeds the cap (callers fall back to sampled mode).
SupportFamily enumerate_supports(unsigned d, unsigned k,
                                 std::uint64_t cap = kDefaultFamilyCap);

/// `count` distinct supports drawn without replacement, deterministic in
/// the seed; kept in sorted order.
SupportFamily sample_supports(unsigned d, unsigned k, std::size_t count,
                              std::uint64_t seed);

/// Per-support +-1 labels for a fixed input set, plus the family mean
/// label per input. The mean is exact (counting identity) in exhaustive
/// mode and the family average otherwise.
struct FamilyLabels {
  std::size_t n = 0;
  std::size_t count = 0;              // number of supports
  std::vector<int8_t> h;              // column-major: h[s * n + i]
  std::vector<double> mean;           // mean label per input
  bool exact_mean = false;
};

FamilyLabels compute_family_labels(const SupportFamily& family,
                                   std::span<const SignVector> inputs,
                                   unsigned workers = 1);

/// Predictions and per-sample gradients of the model on a fixed input set.
/// Gradients are stored column-major: grads[i * dim + j] is coordinate j of
/// sample i's gradient.
struct BatchEval {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> preds;
  std::vector<double> grads;
};

BatchEval batch_eval(const DifferentiableModel& model, std::span<const double> theta,
                     std::span<const SignVector> inputs, unsigned workers = 1);

/// ||grad L_{n,S} - mean_S grad L_{n,S}||_2 for every support. The
/// prediction term cancels, so only gradients and labels enter.
std::vector<double> deviation_norms(const BatchEval& eval, const FamilyLabels& labels,
                                    unsigned workers = 1);

struct MeanGradientResult {
  GradientVector value;
  bool exact = false;    // exhaustive family
  double std_error = 0.0; // sqrt(Var_n / |family|) in sampled mode, else 0
};

/// Mean over the family of the per-support empirical-loss gradient.
MeanGradientResult mean_gradient(const DifferentiableModel& model,
                                 std::span<const double> theta,
                                 const SupportFamily& family,
                                 std::span<const SignVector> inputs,
                                 unsigned workers = 1);

/// E_{S1}[ ||grad L_{n,S1} - E_{S2}[grad L_{n,S2}]||^2 ].
double gradient_variance(const DifferentiableModel& model,
                         std::span<const double> theta,
                         const SupportFamily& family,
                         std::span<const SignVector> inputs,
                         unsigned workers = 1);

/// 2 sqrt(d/n) * sup_sq, the gradient-variance bound.
double variance_bound(unsigned d, std::size_t n, double sup_sq);

inline constexpr std::size_t kDefaultGramCap = 4096;

/// Dense Gram matrix of pairwise empirical inner products of the family's
/// majority functions; symmetric with unit diagonal.
struct GramMatrix {
  std::size_t size = 0;
  std::vector<double> values; // row-major size x size
  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
};

GramMatrix gram_matrix(const SupportFamily& family, std::span<const SignVector> inputs,
                       std::size_t cap = kDefaultGramCap, unsigned workers = 1);

/// Largest eigenvalue by power iteration from the all-ones start vector,
/// to relative tolerance tol. If the start is (numerically) orthogonal to
/// the dominant eigenspace the iteration restarts from canonical basis
/// vectors, deterministically.
double lambda_max(const GramMatrix& gram, double tol = 1e-10);

struct FrameCheck {
  double lhs = 0.0; // sum_S <f, h_S>_n^2
  double rhs = 0.0; // lambda_max(G) * ||f||_n^2
};

FrameCheck partial_frame_check(const SupportFamily& family,
                               std::span<const SignVector> inputs,
                               const Predictor& f,
                               std::size_t cap = kDefaultGramCap,
                               unsigned workers = 1);

/// Which side of the threshold hides the support.
///   hide_when_close: return the mean when the true gradient is already
///     epsilon-close to it (the returned vector is always epsilon-accurate).
///   paper_literal: return the mean when the deviation is >= epsilon,
///     matching the printed definition.
/// At deviation exactly epsilon the mean branch is taken in both modes.
enum class OracleDirection { hide_when_close, paper_literal };

std::string to_string(OracleDirection dir);
OracleDirection oracle_direction_from_string(const std::string& s);

struct OracleConfig {
  double epsilon = std::numeric_limits<double>::infinity();
  OracleDirection direction = OracleDirection::hide_when_close;

  void validate() const;
};

/// Branch rule shared by oracle_query and the trajectory engine.
bool oracle_takes_mean_branch(double deviation, const OracleConfig& cfg);

struct OracleAnswer {
  GradientVector gradient;
  bool mean_branch = false;
  double deviation = 0.0;
};

OracleAnswer oracle_query(const DifferentiableModel& model, std::span<const double> theta,
                          const Support& s, const SupportFamily& family,
                          std::span<const SignVector> inputs, const OracleConfig& cfg,
                          unsigned workers = 1);

/// Gradient descent driven purely by the mean gradient.
struct TrajectoryRecord {
  std::vector<std::vector<double>> thetas;      // T+1 parameter points
  std::vector<GradientVector> mean_gradients;   // mean gradient at each point
  double lr = 0.0;
  unsigned T = 0;
  /// Per-step per-support deviation norms, when requested: [t][support].
  std::vector<std::vector<double>> deviations;
};

TrajectoryRecord run_mean_trajectory(const DifferentiableModel& model,
                                     std::vector<double> theta0,
                                     const SupportFamily& family,
                                     std::span<const SignVector> inputs,
                                     unsigned T, double lr,
                                     bool record_deviations = false,
                                     unsigned workers = 1);

struct QResult {
  std::vector<std::size_t> members; // indices into family.supports
  double probability = 0.0;         // |Q| / |family|
};

/// Supports whose deviation stays within epsilon at every recorded step
/// (hide_when_close direction). Requires recorded deviations.
QResult compute_q(const TrajectoryRecord& traj, const SupportFamily& family,
                  double epsilon);

struct ProbabilityBound {
  double value = 0.0;   // raw, may be negative
  double clamped = 0.0; // max(value, 0)
  bool vacuous = false; // value <= 0
};

/// 1 - (2T/eps^2) sqrt(d/n) sup_sq; DivisionByZero for eps = 0.
ProbabilityBound q_probability_bound(unsigned T, double epsilon, unsigned d,
                                     std::size_t n, double sup_sq);

/// E_{S in family}[ sup_x |maj(x,S) - f(x)| ], exact over all 2^d inputs.
/// Requires d <= 16.
double linf_error(const Predictor& pred, const SupportFamily& family,
                  unsigned workers = 1);

struct AutomorphismReport {
  bool has_fixed_point = false;   // sigma(S) = S for some family member
  bool maps_q_into_q = true;      // sigma(Q) subset of Q
  std::size_t q_size = 0;
};

/// Cyclic index shift sigma(S) = {(j mod d) + 1 : j in S}, applied to a
/// noninformative set; reported, not asserted.
AutomorphismReport shift_automorphism_report(const SupportFamily& family,
                                             const std::vector<std::size_t>& q_members);

} // namespace majlab
