#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>

#include "majlab/errors.hpp"

namespace majlab {

/// Chernoff upper tail: Pr[X >= mu(1+delta)] <= exp(-delta^2 mu / 3),
/// for delta > 0.
double chernoff_upper(double mu, double delta);

/// Chernoff lower tail: Pr[X <= mu(1-delta)] <= exp(-delta^2 mu / 2),
/// for 0 < delta < 1.
double chernoff_lower(double mu, double delta);

/// Two-sided Hoeffding bound 2 exp(-2 t^2 / sum (b_i - a_i)^2).
double hoeffding_bound(double t, std::span<const std::pair<double, double>> ranges);

/// Same, for n i.i.d. variables sharing one range.
double hoeffding_bound(std::size_t n, double t, std::pair<double, double> range);

struct BoundValue {
  double value = 0.0;
  bool vacuous = false; // a lower bound <= 0 constrains nothing
};

/// 1 - (4T/eps^2) sqrt(d/n) sup_sq - exp_term, the mean-squared-error
/// lower bound with the exponential slack exposed as a caller-supplied
/// term (default 0).
BoundValue mse_bound_rhs(unsigned T, double epsilon, unsigned d, std::size_t n,
                         double sup_sq, double exp_term = 0.0);

enum class EpsilonRegime { poly, exp };

std::string to_string(EpsilonRegime regime);

/// V^{1/4} in the polynomial-sample regime, V^{1/3} in the exponential
/// regime, with V = 2 sqrt(d/n) sup_sq.
double choose_epsilon(EpsilonRegime regime, double v);

struct TheoremParameterReport {
  double c = 0.0;                   // 4c1 + 4c2 + 2c3 + 2c4 + 1
  double n_required = 0.0;          // d^c
  double t_allowed = 0.0;           // d^{c3}
  bool n_ok = false;                // n >= d^c
  bool t_ok = false;                // T <= d^{c3}
  bool hypothesis_met = false;      // both
  double error_floor_exponent = 0;  // c4: the implied d^{-c4} error floor
};

/// Checks whether (d, n, T) sit inside the polynomial-sample theorem's
/// regime for exponents c1..c4.
TheoremParameterReport theorem_parameter_check(double c1, double c2, double c3,
                                               double c4, unsigned d,
                                               std::size_t n, unsigned T);

} // namespace majlab
