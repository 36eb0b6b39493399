#include "majlab/bounds.hpp"

#include <cmath>

namespace majlab {

double chernoff_upper(double mu, double delta) {
  if (!(delta > 0)) throw DomainError("chernoff_upper: delta must be > 0");
  if (!(mu >= 0)) throw DomainError("chernoff_upper: mu must be >= 0");
  return std::exp(-delta * delta * mu / 3.0);
}

double chernoff_lower(double mu, double delta) {
  if (!(delta > 0 && delta < 1))
    throw DomainError("chernoff_lower: delta must be in (0,1)");
  if (!(mu >= 0)) throw DomainError("chernoff_lower: mu must be >= 0");
  return std::exp(-delta * delta * mu / 2.0);
}

double hoeffding_bound(double t, std::span<const std::pair<double, double>> ranges) {
  if (ranges.empty()) throw DomainError("hoeffding_bound: ranges must be nonempty");
  double denom = 0.0;
  for (const auto& [a, b] : ranges) {
    if (!(b >= a)) throw DomainError("hoeffding_bound: range with b < a");
    denom += (b - a) * (b - a);
  }
  if (denom == 0) throw DomainError("hoeffding_bound: all ranges degenerate");
  return 2.0 * std::exp(-2.0 * t * t / denom);
}

double hoeffding_bound(std::size_t n, double t, std::pair<double, double> range) {
  if (n == 0) throw DomainError("hoeffding_bound: n must be >= 1");
  const auto [a, b] = range;
  if (!(b > a)) throw DomainError("hoeffding_bound: degenerate range");
  const double denom = static_cast<double>(n) * (b - a) * (b - a);
  return 2.0 * std::exp(-2.0 * t * t / denom);
}

BoundValue mse_bound_rhs(unsigned T, double epsilon, unsigned d, std::size_t n,
                         double sup_sq, double exp_term) {
  if (epsilon == 0) throw DivisionByZero("mse_bound_rhs: epsilon = 0");
  if (!(epsilon > 0)) throw DomainError("mse_bound_rhs: epsilon must be positive");
  if (n == 0) throw DomainError("mse_bound_rhs: n must be >= 1");
  const double value =
      1.0 -
      (4.0 * T / (epsilon * epsilon)) *
          std::sqrt(static_cast<double>(d) / static_cast<double>(n)) * sup_sq -
      exp_term;
  return BoundValue{.value = value, .vacuous = value <= 0.0};
}

std::string to_string(EpsilonRegime regime) {
  return regime == EpsilonRegime::poly ? "poly" : "exp";
}

double choose_epsilon(EpsilonRegime regime, double v) {
  if (!(v > 0)) throw DomainError("choose_epsilon: V must be positive");
  return regime == EpsilonRegime::poly ? std::pow(v, 0.25) : std::cbrt(v);
}

TheoremParameterReport theorem_parameter_check(double c1, double c2, double c3,
                                               double c4, unsigned d,
                                               std::size_t n, unsigned T) {
  for (double c : {c1, c2, c3, c4}) {
    if (!(c > 0)) throw DomainError("theorem_parameter_check: exponents must be > 0");
  }
  if (d < 2) throw DomainError("theorem_parameter_check: d must be >= 2");
  TheoremParameterReport report;
  report.c = 4.0 * c1 + 4.0 * c2 + 2.0 * c3 + 2.0 * c4 + 1.0;
  report.n_required = std::pow(static_cast<double>(d), report.c);
  report.t_allowed = std::pow(static_cast<double>(d), c3);
  report.n_ok = static_cast<double>(n) >= report.n_required;
  report.t_ok = static_cast<double>(T) <= report.t_allowed;
  report.hypothesis_met = report.n_ok && report.t_ok;
  report.error_floor_exponent = c4;
  return report;
}

} // namespace majlab
