#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "illiq/impact.hpp"
#include "illiq/report.hpp"
#include "illiq/riskmeasure.hpp"
#include "illiq/scenario.hpp"

namespace illiq {

/// beta(y) = rho(Z_y) with Z_y the block exposure; y >= 0, y = 0 gives rho(X~).
double beta(const ImpactModel& model, const ScenarioVector& x_tilde, const RiskFunctional& rho_fn,
            const std::optional<ProbabilityVector>& p, double y);

/// rho of the split exposure; y >= 0, y = 0 gives 0 (empty integral).
double beta_split(const ImpactModel& model, const ScenarioVector& x_tilde, const RiskFunctional& rho_fn,
                  const std::optional<ProbabilityVector>& p, double y, const Quadrature& quadrature = {});

/// delta(y) = rho(-Z_y) for a short position y <= 0.
///
/// Allowed for linear, sign-linear, power-law and separable additive models
/// with any rho; separable multiplicative and exponential models need a
/// positively homogeneous rho; the stochastic slope needs the worst case.
/// Anything else raises UnsupportedModelForShortSide.
double delta_short(const ImpactModel& model, const ScenarioVector& x_tilde, const RiskFunctional& rho_fn,
                   const std::optional<ProbabilityVector>& p, double y);

bool short_side_supported(const ImpactModel& model, const RiskFunctional& rho_fn);

enum class CapitalPolicy { block, split };

struct CapitalLeg {
  std::string asset;
  double y = 0.0;
  double beta_value = 0.0;
  double initial_cost = 0.0;
  double capital = 0.0;
};

struct CapitalReport {
  CapitalPolicy policy = CapitalPolicy::block;
  double beta_value = 0.0;
  double initial_cost = 0.0;
  double capital_requirement = 0.0;
  /// Split policy only: the same requirement with the initial leg bought by
  /// splitting as well (integral of X_0 instead of y*X_0(y)).
  double initial_cost_split = 0.0;
  double capital_requirement_split_initial = 0.0;
  std::vector<CapitalLeg> per_asset;
};

/// block: beta_value is per share and CR = y*beta + y*X_0(y).
/// split: beta_value is the aggregate beta_split and CR = beta_split + y*X_0(y).
CapitalReport capital_requirement(double y, double beta_value, const SupplyCurve& curve, CapitalPolicy policy);

struct PortfolioAsset {
  std::string name;
  ImpactModel model;
  ScenarioVector x_tilde;
  SupplyCurve x0;
};

/// rho(sum_i Z^i_{y_i}); every y_i must be > 0.
double beta_portfolio(const std::vector<PortfolioAsset>& assets, const RiskFunctional& rho_fn,
                      const std::optional<ProbabilityVector>& p, const std::vector<double>& y);

double beta_portfolio_split(const std::vector<PortfolioAsset>& assets, const RiskFunctional& rho_fn,
                            const std::optional<ProbabilityVector>& p, const std::vector<double>& y,
                            const Quadrature& quadrature = {});

/// Price-based portfolio requirement built from per-asset legs:
///   block: sum_i y_i (beta^i(y_i) + X_0^i(y_i))
///   split: sum_i (beta^i_split(y_i) + y_i X_0^i(y_i))
/// `beta_value` carries the joint beta(y) (or beta_split(y)) of the portfolio.
CapitalReport capital_portfolio(const std::vector<PortfolioAsset>& assets, const RiskFunctional& rho_fn,
                                const std::optional<ProbabilityVector>& p, const std::vector<double>& y,
                                CapitalPolicy policy, const Quadrature& quadrature = {});

/// Return-based requirement (sum_i y_i X_0^i(y_i)) * beta for a beta measured
/// on log prices.
double capital_portfolio_return_based(const std::vector<double>& y, const std::vector<SupplyCurve>& x0, double beta);

/// VaR_delta of the sum of GBM log prices plus sum_i a_i y_i T:
///   -Phi^-1(delta) sqrt(T) sqrt(e' Sigma e) - sum_i (mu_i - sigma_i^2/2) T + sum_i (a_i y_i T - ln x0_i)
/// with Sigma = diag(sigma) R diag(sigma). Measures log prices, not the sum
/// of prices. All assets share params[0].horizon.
double var_gbm_portfolio(const std::vector<GbmParams>& params, const std::vector<double>& a,
                         const std::vector<std::vector<double>>& correlation, const std::vector<double>& y,
                         double delta);

enum class MeasureProfile {
  beta,             ///< increasing, beta(y+m) >= beta(y)-m, convex
  beta_split,       ///< decreasing, beta(y+m) <= beta(y)+m, convex
  delta_short,      ///< decreasing, delta(y+m) <= delta(y)+m, concave; domain y <= 0
};

struct AxiomSweep {
  double lo = 0.0;
  double hi = 100.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  /// Convexity (or concavity) failures are expected, e.g. when the block
  /// exposure is not concave.
  bool curvature_expected_to_fail = false;
};

/// Seeded (y, v, m, lambda) samples on (lo, hi]; for delta_short the domain
/// is [lo, hi] with hi <= 0. Tolerances scale with max(1, |values|).
std::vector<AxiomReport> check_measure_axioms(const std::function<double(double)>& measure, MeasureProfile profile,
                                              const AxiomSweep& sweep);

/// Portfolio version: y, v in (lo, hi]^n, shift by m*e, componentwise order.
std::vector<AxiomReport> check_portfolio_axioms(const std::function<double(const std::vector<double>&)>& measure,
                                                std::size_t n, MeasureProfile profile, const AxiomSweep& sweep);

}  // namespace illiq
