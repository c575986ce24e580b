#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "illiq/report.hpp"
#include "illiq/scenario.hpp"

namespace illiq {

/// rho(Z) = -min_w Z(w). Needs no probability.
struct WorstCase {};
/// inf{m : P(Z + m < 0) <= delta}.
struct ValueAtRisk {
  double delta = 0.05;
};
/// (1/delta) * integral of VaR_u over u in (0, delta].
struct AverageValueAtRisk {
  double delta = 0.05;
};
/// (1/lambda) ln E_P[exp(-lambda Z)].
struct Entropic {
  double lambda = 1.0;
};

using RiskFunctional = std::variant<WorstCase, ValueAtRisk, AverageValueAtRisk, Entropic>;

std::string functional_name(const RiskFunctional& f);
bool requires_probability(const RiskFunctional& f);
bool positively_homogeneous(const RiskFunctional& f);
bool is_convex(const RiskFunctional& f);
void validate(const RiskFunctional& f);

/// Throws MissingProbability when `p` is null and the functional needs it,
/// NonFiniteInput on non-finite values.
double rho(const RiskFunctional& f, std::span<const double> z, const ProbabilityVector* p);
double rho(const RiskFunctional& f, const ScenarioVector& z, const std::optional<ProbabilityVector>& p);

/// VaR at level u in [0, 1); u = 0 gives -ess inf Z.
double value_at_risk(std::span<const double> z, const ProbabilityVector& p, double u);
double average_value_at_risk(std::span<const double> z, const ProbabilityVector& p, double delta);

/// (1/delta) times the trapezoid integral of u -> VaR_u(Z) over [0, delta]
/// with `levels` panels. Reference path for the exact tail average.
double avar_from_var_curve(std::span<const double> z, const ProbabilityVector& p, double delta, std::size_t levels);

/// VaR_delta of the GBM terminal price:
///   -exp(Phi^-1(delta) sigma sqrt(T) + (mu - sigma^2/2) T + ln x0).
double var_gbm_closed_form(const GbmParams& params, double delta);

/// (1/delta) * trapezoid integral of the closed-form GBM VaR curve over
/// [0, delta] with `levels` panels.
double avar_gbm_trapezoid(const GbmParams& params, double delta, std::size_t levels = 4096);

/// Exact lognormal AVaR: -(1/delta) x0 e^{mu T} Phi(Phi^-1(delta) - sigma sqrt(T)).
double avar_gbm_exact(const GbmParams& params, double delta);

/// Seeded random probes of monotonicity, cash invariance and convexity of
/// rho on `n_scenarios` scenarios. VaR convexity failures are classified as
/// expected.
std::vector<AxiomReport> check_rho_axioms(const RiskFunctional& f, const std::optional<ProbabilityVector>& p,
                                          std::size_t n_scenarios, std::size_t trials, std::uint64_t seed,
                                          double tolerance = 1e-9);

}  // namespace illiq
