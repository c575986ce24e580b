#include "illiq/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "illiq/errors.hpp"
#include "illiq/random.hpp"

namespace illiq {

namespace {

ScenarioVector negated(const ScenarioVector& z) { return -1.0 * z; }

void require_positions(const std::vector<PortfolioAsset>& assets, const std::vector<double>& y) {
  if (assets.empty()) throw InvalidParams("portfolio needs at least one asset");
  if (assets.size() != y.size()) throw InvalidParams("portfolio positions and assets differ in length");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) {
      throw InvalidParams(fmt::format("portfolio position {} ('{}') must be > 0, got {}", i, assets[i].name, y[i]));
    }
  }
  for (const auto& a : assets) require_same_space(assets.front().x_tilde, a.x_tilde);
}

}  // namespace

double beta(const ImpactModel& model, const ScenarioVector& x_tilde, const RiskFunctional& rho_fn,
            const std::optional<ProbabilityVector>& p, double y) {
  if (!(y >= 0.0)) throw InvalidParams(fmt::format("beta needs y >= 0, got {}", y));
  return rho(rho_fn, offsetting_exposure(model, x_tilde, y).z, p);
}

double beta_split(const ImpactModel& model, const ScenarioVector& x_tilde, const RiskFunctional& rho_fn,
                  const std::optional<ProbabilityVector>& p, double y, const Quadrature& quadrature) {
  if (!(y >= 0.0)) throw InvalidParams(fmt::format("beta_split needs y >= 0, got {}", y));
  return rho(rho_fn, split_exposure(model, x_tilde, y, quadrature).z, p);
}

bool short_side_supported(const ImpactModel& model, const RiskFunctional& rho_fn) {
  if (std::holds_alternative<LinearAdditive>(model) || std::holds_alternative<SignLinear>(model) ||
      std::holds_alternative<PowerLaw>(model) || std::holds_alternative<SeparableAdditive>(model)) {
    return true;
  }
  if (std::holds_alternative<SeparableMultiplicative>(model) ||
      std::holds_alternative<ExponentialMultiplicative>(model)) {
    return positively_homogeneous(rho_fn);
  }
  if (std::holds_alternative<StochasticSlope>(model)) return std::holds_alternative<WorstCase>(rho_fn);
  return false;
}

double delta_short(const ImpactModel& model, const ScenarioVector& x_tilde, const RiskFunctional& rho_fn,
                   const std::optional<ProbabilityVector>& p, double y) {
  if (!(y <= 0.0)) throw InvalidParams(fmt::format("delta_short needs y <= 0, got {}", y));
  if (!short_side_supported(model, rho_fn)) {
    throw UnsupportedModelForShortSide(model_name(model) + " with " + functional_name(rho_fn));
  }
  return rho(rho_fn, negated(offsetting_exposure(model, x_tilde, y).z), p);
}

CapitalReport capital_requirement(double y, double beta_value, const SupplyCurve& curve, CapitalPolicy policy) {
  CapitalReport r;
  r.policy = policy;
  r.beta_value = beta_value;
  r.initial_cost = initial_cost(curve, y, CostPolicy::block);
  if (policy == CapitalPolicy::block) {
    r.capital_requirement = y * beta_value + r.initial_cost;
  } else {
    r.capital_requirement = beta_value + r.initial_cost;
    r.initial_cost_split = initial_cost(curve, y, CostPolicy::split);
    r.capital_requirement_split_initial = beta_value + r.initial_cost_split;
  }
  r.per_asset.push_back({"", y, beta_value, r.initial_cost, r.capital_requirement});
  return r;
}

double beta_portfolio(const std::vector<PortfolioAsset>& assets, const RiskFunctional& rho_fn,
                      const std::optional<ProbabilityVector>& p, const std::vector<double>& y) {
  require_positions(assets, y);
  ScenarioVector total = offsetting_exposure(assets[0].model, assets[0].x_tilde, y[0]).z;
  for (std::size_t i = 1; i < assets.size(); ++i) {
    total = total + offsetting_exposure(assets[i].model, assets[i].x_tilde, y[i]).z;
  }
  return rho(rho_fn, total, p);
}

double beta_portfolio_split(const std::vector<PortfolioAsset>& assets, const RiskFunctional& rho_fn,
                            const std::optional<ProbabilityVector>& p, const std::vector<double>& y,
                            const Quadrature& quadrature) {
  require_positions(assets, y);
  ScenarioVector total = split_exposure(assets[0].model, assets[0].x_tilde, y[0], quadrature).z;
  for (std::size_t i = 1; i < assets.size(); ++i) {
    total = total + split_exposure(assets[i].model, assets[i].x_tilde, y[i], quadrature).z;
  }
  return rho(rho_fn, total, p);
}

CapitalReport capital_portfolio(const std::vector<PortfolioAsset>& assets, const RiskFunctional& rho_fn,
                                const std::optional<ProbabilityVector>& p, const std::vector<double>& y,
                                CapitalPolicy policy, const Quadrature& quadrature) {
  require_positions(assets, y);
  CapitalReport r;
  r.policy = policy;
  const bool block = policy == CapitalPolicy::block;
  r.beta_value = block ? beta_portfolio(assets, rho_fn, p, y) : beta_portfolio_split(assets, rho_fn, p, y, quadrature);
  for (std::size_t i = 0; i < assets.size(); ++i) {
    const auto& a = assets[i];
    CapitalLeg leg;
    leg.asset = a.name;
    leg.y = y[i];
    leg.initial_cost = initial_cost(a.x0, y[i], CostPolicy::block);
    if (block) {
      leg.beta_value = beta(a.model, a.x_tilde, rho_fn, p, y[i]);
      leg.capital = y[i] * leg.beta_value + leg.initial_cost;
    } else {
      leg.beta_value = beta_split(a.model, a.x_tilde, rho_fn, p, y[i], quadrature);
      leg.capital = leg.beta_value + leg.initial_cost;
      r.initial_cost_split += initial_cost(a.x0, y[i], CostPolicy::split);
      r.capital_requirement_split_initial += leg.beta_value + initial_cost(a.x0, y[i], CostPolicy::split);
    }
    r.initial_cost += leg.initial_cost;
    r.capital_requirement += leg.capital;
    r.per_asset.push_back(std::move(leg));
  }
  return r;
}

double capital_portfolio_return_based(const std::vector<double>& y, const std::vector<SupplyCurve>& x0, double beta) {
  if (y.size() != x0.size()) throw InvalidParams("positions and supply curves differ in length");
  double notional = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) notional += y[i] * x0[i](y[i]);
  return notional * beta;
}

double var_gbm_portfolio(const std::vector<GbmParams>& params, const std::vector<double>& a,
                         const std::vector<std::vector<double>>& correlation, const std::vector<double>& y,
                         double delta) {
  const std::size_t n = params.size();
  if (n == 0) throw InvalidParams("portfolio needs at least one asset");
  if (a.size() != n || y.size() != n || correlation.size() != n) {
    throw InvalidParams("portfolio inputs differ in length");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParams("VaR level must lie in (0,1)");
  const double horizon = params[0].horizon;
  Eigen::MatrixXd r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    params[i].validate();
    if (params[i].horizon != horizon) throw InvalidParams("all assets must share one horizon");
    if (!(y[i] > 0.0)) throw InvalidParams("portfolio positions must be > 0");
    if (correlation[i].size() != n) throw NonPSDCovariance("correlation matrix is not square");
    for (std::size_t j = 0; j < n; ++j) r(i, j) = correlation[i][j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(r(i, i) - 1.0) > 1e-12) throw NonPSDCovariance("correlation diagonal must be 1");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(r(i, j) - r(j, i)) > 1e-12) throw NonPSDCovariance("correlation matrix is not symmetric");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw NonPSDCovariance(fmt::format("smallest eigenvalue {}", eig.eigenvalues().minCoeff()));
  }
  double quad = 0.0;
  double drift = 0.0;
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) quad += params[i].sigma * r(i, j) * params[j].sigma;
    drift += (params[i].mu - 0.5 * params[i].sigma * params[i].sigma) * horizon;
    shift += a[i] * y[i] * horizon - std::log(params[i].x0);
  }
  return -rng::normal_quantile(delta) * std::sqrt(horizon) * std::sqrt(std::max(quad, 0.0)) - drift + shift;
}

std::vector<AxiomReport> check_measure_axioms(const std::function<double(double)>& measure, MeasureProfile profile,
                                              const AxiomSweep& sweep) {
  if (sweep.trials == 0) throw InvalidParams("trials must be at least 1");
  if (!(sweep.hi > sweep.lo)) throw InvalidParams("sweep needs lo < hi");
  const bool increasing = profile == MeasureProfile::beta;
  const bool sub_additive = profile == MeasureProfile::beta;
  const bool convex = profile != MeasureProfile::delta_short;

  AxiomReport mono{increasing ? "increasing" : "decreasing"};
  AxiomReport cash{sub_additive ? "cash_sub_additivity" : "cash_super_additivity"};
  AxiomReport curv{convex ? "convexity" : "concavity"};
  curv.expected_to_fail = sweep.curvature_expected_to_fail;

  const std::uint64_t stream = rng::derive_seed(sweep.seed, 0x6d656173);
  const double width = sweep.hi - sweep.lo;
  auto tol_of = [&](std::initializer_list<double> vals) {
    double s = 1.0;
    for (double v : vals) s = std::max(s, std::abs(v));
    return sweep.tolerance * s;
  };
  for (std::size_t t = 0; t < sweep.trials; ++t) {
    rng::CounterStream s(stream, 4 * t);
    // U in (0,1) keeps y strictly inside (lo, hi).
    double y = sweep.hi - width * s.uniform();
    double v = sweep.hi - width * s.uniform();
    if (y < v) std::swap(y, v);
    const double m = (sweep.hi - y) * s.uniform();
    const double lam = s.uniform();

    const double fy = measure(y);
    const double fv = measure(v);
    ++mono.pairs_tested;
    if (increasing ? fy < fv - tol_of({fy, fv}) : fy > fv + tol_of({fy, fv})) {
      mono.record(fmt::format("y={}, v={}", y, v), fy, fv, std::abs(fy - fv));
    }

    const double fym = measure(y + m);
    ++cash.pairs_tested;
    if (sub_additive) {
      if (fym < fy - m - tol_of({fym, fy, m})) cash.record(fmt::format("y={}, m={}", y, m), fym, fy - m, fy - m - fym);
    } else if (fym > fy + m + tol_of({fym, fy, m})) {
      cash.record(fmt::format("y={}, m={}", y, m), fym, fy + m, fym - fy - m);
    }

    const double mid = measure(lam * y + (1.0 - lam) * v);
    const double chord = lam * fy + (1.0 - lam) * fv;
    const double tol = tol_of({mid, fy, fv});
    ++curv.pairs_tested;
    if (convex ? mid > chord + tol : mid < chord - tol) {
      curv.record(fmt::format("y={}, v={}, lambda={}", y, v, lam), mid, chord, std::abs(mid - chord));
    }
  }
  return {mono, cash, curv};
}

std::vector<AxiomReport> check_portfolio_axioms(const std::function<double(const std::vector<double>&)>& measure,
                                                std::size_t n, MeasureProfile profile, const AxiomSweep& sweep) {
  if (sweep.trials == 0 || n == 0) throw InvalidParams("trials and dimension must be at least 1");
  if (profile == MeasureProfile::delta_short) throw InvalidParams("no portfolio short-side profile");
  const bool increasing = profile == MeasureProfile::beta;
  AxiomReport mono{increasing ? "increasing" : "decreasing"};
  AxiomReport cash{increasing ? "cash_sub_additivity" : "cash_super_additivity"};
  AxiomReport curv{"convexity"};
  curv.expected_to_fail = sweep.curvature_expected_to_fail;

  const std::uint64_t stream = rng::derive_seed(sweep.seed, 0x706f7274);
  const double width = sweep.hi - sweep.lo;
  std::vector<double> y(n), v(n), ym(n), mix(n);
  for (std::size_t t = 0; t < sweep.trials; ++t) {
    rng::CounterStream s(stream, (2 * n + 2) * t);
    for (std::size_t i = 0; i < n; ++i) v[i] = sweep.hi - width * s.uniform();
    for (std::size_t i = 0; i < n; ++i) y[i] = v[i] + (sweep.hi - v[i]) * s.uniform();
    const double top = *std::max_element(y.begin(), y.end());
    const double m = (sweep.hi - top) * s.uniform();
    const double lam = s.uniform();
    for (std::size_t i = 0; i < n; ++i) {
      ym[i] = y[i] + m;
      mix[i] = lam * y[i] + (1.0 - lam) * v[i];
    }
    const double fy = measure(y);
    const double fv = measure(v);
    const double fym = measure(ym);
    const double fmix = measure(mix);
    const double tol = sweep.tolerance * std::max({1.0, std::abs(fy), std::abs(fv), std::abs(fym), std::abs(fmix)});
    const std::string at = fmt::format("trial {}", t);

    ++mono.pairs_tested;
    if (increasing ? fy < fv - tol : fy > fv + tol) mono.record(at, fy, fv, std::abs(fy - fv));
    ++cash.pairs_tested;
    if (increasing ? fym < fy - m - tol : fym > fy + m + tol) {
      cash.record(at + fmt::format(", m={}", m), fym, increasing ? fy - m : fy + m, std::abs(fym - fy) - m);
    }
    ++curv.pairs_tested;
    const double chord = lam * fy + (1.0 - lam) * fv;
    if (fmix > chord + tol) curv.record(at + fmt::format(", lambda={}", lam), fmix, chord, fmix - chord);
  }
  return {mono, cash, curv};
}

}  // namespace illiq
