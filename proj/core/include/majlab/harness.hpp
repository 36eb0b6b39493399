#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "majlab/bounds.hpp"
#include "majlab/combinatorics.hpp"
#include "majlab/oracle.hpp"

namespace majlab {

enum class ModelKind { transformer, linear };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct RunConfig {
  unsigned d = 0;
  unsigned k = 0;
  std::size_t n = 0;
  unsigned T = 0;
  double lr = 0.1;
  /// Unset means "auto": epsilon = V^{1/4} or V^{1/3} from the measured
  /// sup estimate. May be +infinity.
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  ModelKind model = ModelKind::transformer;
  RecursionMode recursion = RecursionMode::computed_tokens;
  bool family_exhaustive = true;
  std::size_t family_count = 0; // sampled mode only
  OracleDirection direction = OracleDirection::hide_when_close;
  unsigned workers = 1;

  void validate() const;
};

struct ReportedScalar {
  double value = 0.0;
  std::string basis; // "exact" | "empirical-sup" | "analytic" | "monte-carlo"
  bool vacuous = false;
};

struct StepStats {
  double loss = 0.0; // empirical loss against the true support's labels
  double dev_min = 0.0;
  double dev_median = 0.0;
  double dev_max = 0.0;
  double branch_mean_fraction = 0.0;
};

struct RunReport {
  RunConfig config;
  bool oracle_enabled = true;
  std::vector<unsigned> true_support;

  double epsilon_used = 0.0;
  bool epsilon_auto = false;
  EpsilonRegime regime = EpsilonRegime::poly;

  ReportedScalar sup_grad_sq_pre;   // used to pick epsilon
  ReportedScalar sup_grad_sq_final; // includes trajectory points

  MseEstimate test_mse;                  // vs the true support
  std::optional<double> family_mse;      // exact E_{S,x} when computable
  std::vector<double> loss_trace;        // T+1 values
  std::vector<StepStats> steps;          // T+1 rows

  std::optional<double> pr_q;
  std::size_t q_size = 0;
  std::optional<ProbabilityBound> q_bound;
  std::optional<BoundValue> mse_rhs;
  double exp_term = 0.0;
  std::optional<double> linf;
  std::optional<AutomorphismReport> automorphism;

  bool oracle_always_hid = true;
  unsigned true_branch_steps = 0;
  bool q_bound_violated = false;   // pr_q below a positive bound
  bool mse_bound_violated = false; // measured mse below a positive rhs

  std::vector<double> final_theta;
  double wall_seconds = 0.0;

  bool any_violation() const { return q_bound_violated || mse_bound_violated; }
};

/// Full oracle-training pipeline: dataset, family, epsilon resolution,
/// mean-gradient trajectory with per-step deviation statistics, the
/// noninformative set, and all reported bounds.
RunReport train_run(const RunConfig& config);

/// Same pipeline with the oracle bypassed: plain gradient descent on the
/// true support's empirical loss. Deviation/Q machinery is skipped.
RunReport control_run(const RunConfig& config);

std::string report_to_json(const RunReport& report);
/// step,t_empirical_loss,dev_min,dev_median,dev_max,branch_mean_fraction
std::string train_trace_csv(const RunReport& report);

// -- sweep drivers ----------------------------------------------------------

struct VerifyRow {
  unsigned d = 0, k = 0, m = 0;
  BigInt a;
  BigInt brute_a;
  bool identity_ok = false;
  bool ok() const { return identity_ok && a == brute_a; }
};

/// Exhaustive cross-check of the closed-form support count against the
/// brute-force oracle and of both identity sides, for all (d,k,m), d <= d_max.
std::vector<VerifyRow> run_verify(unsigned d_max, unsigned workers = 1);
std::string verify_csv(const std::vector<VerifyRow>& rows);

std::string decay_csv(const std::vector<DecayRow>& rows);

struct BiasRow {
  unsigned d = 0, k = 0, m = 0;
  BigRational bias;
  bool consistent = false; // equals the signed ratio deviation
};

std::vector<BiasRow> run_bias(unsigned d, std::optional<unsigned> k_filter,
                              unsigned workers = 1);
std::string bias_csv(const std::vector<BiasRow>& rows);

struct GramReport {
  std::size_t family_size = 0;
  std::size_t n = 0;
  double lambda_max = 0.0;
  double off_diag_max = 0.0;
  double delta = 0.0; // 2 sqrt(d/n)
  std::size_t off_diag_pairs = 0;
  std::size_t off_diag_violations = 0;
  std::size_t frame_trials = 0;
  std::size_t frame_failures = 0;
  double frame_max_ratio = 0.0; // max lhs/rhs over trials
};

GramReport run_gram(unsigned d, unsigned k, std::size_t n, std::uint64_t seed,
                    std::size_t frame_trials, unsigned workers = 1);
std::string gram_report_json(const GramReport& report, unsigned d, unsigned k,
                             std::uint64_t seed);

struct VarianceTrial {
  std::uint64_t seed = 0;
  unsigned theta_index = 0;
  double variance = 0.0;
  double bound = 0.0;
  bool within = false;
};

struct ChebyshevCheck {
  double epsilon = 0.0;
  double fraction = 0.0;  // supports with deviation > epsilon
  double markov_rhs = 0.0; // variance / epsilon^2
  bool ok = false;
};

struct VarianceReport {
  std::vector<VarianceTrial> trials;
  std::vector<ChebyshevCheck> chebyshev; // over all trials and the eps grid
  std::size_t seeds_with_violation = 0;
  std::size_t seed_count = 0;
};

/// Gradient variance against its bound over fresh datasets; theta points
/// are drawn uniformly from [-1,1]^P per seed. Chebyshev tail fractions
/// are checked at eps = {0.5, 1, 2, 4} * sqrt(variance).
VarianceReport run_variance(unsigned d, unsigned k, std::size_t n,
                            ModelKind model, std::size_t seed_count,
                            std::size_t thetas_per_seed, std::uint64_t seed0,
                            unsigned workers = 1);
std::string variance_csv(const VarianceReport& report);

} // namespace majlab
