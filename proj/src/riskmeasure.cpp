#include "illiq/riskmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <fmt/format.h>

#include "illiq/errors.hpp"
#include "illiq/random.hpp"

namespace illiq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kLevelTolerance = 1e-12;

struct Atom {
  double z;
  double p;
};

/// Support points sorted ascending, ties merged.
std::vector<Atom> sorted_atoms(std::span<const double> z, const ProbabilityVector& p) {
  if (p.size() != z.size()) throw SpaceMismatch("probability vector and values differ in length");
  std::vector<std::size_t> idx;
  idx.reserve(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (p[i] > 0.0) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
  std::vector<Atom> atoms;
  for (std::size_t i : idx) {
    if (!atoms.empty() && atoms.back().z == z[i]) {
      atoms.back().p += p[i];
    } else {
      atoms.push_back({z[i], p[i]});
    }
  }
  return atoms;
}

void require_finite(std::span<const double> z) {
  for (double v : z) {
    if (!std::isfinite(v)) throw NonFiniteInput("risk functional applied to a non-finite value");
  }
}

void check_level(double delta, const char* what) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidParams(fmt::format("{} level must lie in (0,1), got {}", what, delta));
}

double entropic(std::span<const double> z, const ProbabilityVector& p, double lambda) {
  if (p.size() != z.size()) throw SpaceMismatch("probability vector and values differ in length");
  double shift = -INFINITY;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (p[i] > 0.0) shift = std::max(shift, -lambda * z[i]);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (p[i] > 0.0) s += p[i] * std::exp(-lambda * z[i] - shift);
  }
  return (shift + std::log(s)) / lambda;
}

}  // namespace

std::string functional_name(const RiskFunctional& f) {
  return std::visit(overloaded{
                        [](const WorstCase&) { return std::string("worst_case"); },
                        [](const ValueAtRisk& v) { return fmt::format("var({})", v.delta); },
                        [](const AverageValueAtRisk& v) { return fmt::format("avar({})", v.delta); },
                        [](const Entropic& e) { return fmt::format("entropic({})", e.lambda); },
                    },
                    f);
}

bool requires_probability(const RiskFunctional& f) { return !std::holds_alternative<WorstCase>(f); }

bool positively_homogeneous(const RiskFunctional& f) { return !std::holds_alternative<Entropic>(f); }

bool is_convex(const RiskFunctional& f) { return !std::holds_alternative<ValueAtRisk>(f); }

void validate(const RiskFunctional& f) {
  std::visit(overloaded{
                 [](const WorstCase&) {},
                 [](const ValueAtRisk& v) { check_level(v.delta, "VaR"); },
                 [](const AverageValueAtRisk& v) { check_level(v.delta, "AVaR"); },
                 [](const Entropic& e) {
                   if (!(e.lambda > 0.0) || !std::isfinite(e.lambda)) throw InvalidParams("entropic lambda must be > 0");
                 },
             },
             f);
}

double value_at_risk(std::span<const double> z, const ProbabilityVector& p, double u) {
  const auto atoms = sorted_atoms(z, p);
  double cum = 0.0;
  for (const auto& a : atoms) {
    cum += a.p;
    if (cum > u + kLevelTolerance) return -a.z;
  }
  return -atoms.back().z;
}

double average_value_at_risk(std::span<const double> z, const ProbabilityVector& p, double delta) {
  const auto atoms = sorted_atoms(z, p);
  double cum = 0.0;
  double tail = 0.0;
  for (const auto& a : atoms) {
    const double lo = std::min(cum, delta);
    cum += a.p;
    const double hi = std::min(cum, delta);
    tail += a.z * (hi - lo);
    if (cum >= delta) break;
  }
  return -tail / delta;
}

double avar_from_var_curve(std::span<const double> z, const ProbabilityVector& p, double delta, std::size_t levels) {
  check_level(delta, "AVaR");
  const double h = delta / static_cast<double>(levels);
  double s = 0.0;
  for (std::size_t k = 0; k <= levels; ++k) {
    const double u = k == levels ? delta : h * static_cast<double>(k);
    const double w = (k == 0 || k == levels) ? 0.5 : 1.0;
    s += w * value_at_risk(z, p, u);
  }
  return s * h / delta;
}

double rho(const RiskFunctional& f, std::span<const double> z, const ProbabilityVector* p) {
  validate(f);
  require_finite(z);
  if (z.empty()) throw InvalidParams("risk functional applied to an empty vector");
  if (requires_probability(f) && p == nullptr) {
    throw MissingProbability(functional_name(f) + " needs a probability vector");
  }
  return std::visit(overloaded{
                        [&](const WorstCase&) { return -*std::min_element(z.begin(), z.end()); },
                        [&](const ValueAtRisk& v) { return value_at_risk(z, *p, v.delta); },
                        [&](const AverageValueAtRisk& v) { return average_value_at_risk(z, *p, v.delta); },
                        [&](const Entropic& e) { return entropic(z, *p, e.lambda); },
                    },
                    f);
}

double rho(const RiskFunctional& f, const ScenarioVector& z, const std::optional<ProbabilityVector>& p) {
  return rho(f, z.values(), p ? &*p : nullptr);
}

double var_gbm_closed_form(const GbmParams& params, double delta) {
  params.validate();
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidParams("VaR level must lie in [0,1)");
  if (delta == 0.0) return 0.0;
  return -std::exp(rng::normal_quantile(delta) * params.log_stddev() + params.log_mean());
}

double avar_gbm_trapezoid(const GbmParams& params, double delta, std::size_t levels) {
  check_level(delta, "AVaR");
  const double h = delta / static_cast<double>(levels);
  double s = 0.0;
  for (std::size_t k = 0; k <= levels; ++k) {
    const double u = k == levels ? delta : h * static_cast<double>(k);
    const double w = (k == 0 || k == levels) ? 0.5 : 1.0;
    s += w * var_gbm_closed_form(params, u);
  }
  return s * h / delta;
}

double avar_gbm_exact(const GbmParams& params, double delta) {
  params.validate();
  check_level(delta, "AVaR");
  const double mean = params.x0 * std::exp(params.mu * params.horizon);
  return -mean * rng::normal_cdf(rng::normal_quantile(delta) - params.log_stddev()) / delta;
}

std::vector<AxiomReport> check_rho_axioms(const RiskFunctional& f, const std::optional<ProbabilityVector>& p,
                                          std::size_t n_scenarios, std::size_t trials, std::uint64_t seed,
                                          double tolerance) {
  if (trials == 0) throw InvalidParams("trials must be at least 1");
  if (p) n_scenarios = p->size();
  if (n_scenarios == 0) throw InvalidParams("need at least one scenario");
  if (requires_probability(f) && !p) throw MissingProbability(functional_name(f) + " needs a probability vector");
  const ProbabilityVector* pp = p ? &*p : nullptr;

  AxiomReport mono{"decreasing_monotonicity"};
  AxiomReport cash{"cash_invariance"};
  AxiomReport convex{"convexity"};
  convex.expected_to_fail = !is_convex(f);

  const std::uint64_t stream = rng::derive_seed(seed, 0x72686f);
  const std::uint64_t per_trial = 3 * n_scenarios + 2;
  std::vector<double> u(n_scenarios), v(n_scenarios), w(n_scenarios);
  for (std::size_t t = 0; t < trials; ++t) {
    rng::CounterStream s(stream, t * per_trial);
    for (std::size_t i = 0; i < n_scenarios; ++i) u[i] = s.uniform(-100.0, 100.0);
    for (std::size_t i = 0; i < n_scenarios; ++i) v[i] = s.uniform(-100.0, 100.0);
    for (std::size_t i = 0; i < n_scenarios; ++i) w[i] = u[i] - s.uniform(0.0, 50.0);
    const double m = s.uniform(-50.0, 50.0);
    const double lam = s.uniform();
    const double ru = rho(f, u, pp);
    const double rv = rho(f, v, pp);
    const double scale = std::max({1.0, std::abs(ru), std::abs(rv)});
    const double tol = tolerance * scale;

    // w <= u pointwise, so rho(w) >= rho(u).
    ++mono.pairs_tested;
    const double rw = rho(f, w, pp);
    if (rw < ru - tol) mono.record(fmt::format("trial {}", t), rw, ru, ru - rw);

    ++cash.pairs_tested;
    std::vector<double> shifted(u);
    for (auto& x : shifted) x += m;
    const double rs = rho(f, shifted, pp);
    const double cash_err = std::abs(rs - (ru - m));
    if (cash_err > tol * std::max(1.0, std::abs(m))) cash.record(fmt::format("trial {}, m={}", t, m), rs, ru - m, cash_err);

    ++convex.pairs_tested;
    std::vector<double> mix(n_scenarios);
    for (std::size_t i = 0; i < n_scenarios; ++i) mix[i] = lam * u[i] + (1.0 - lam) * v[i];
    const double rm = rho(f, mix, pp);
    const double chord = lam * ru + (1.0 - lam) * rv;
    if (rm > chord + tol) convex.record(fmt::format("trial {}, lambda={}", t, lam), rm, chord, rm - chord);
  }
  return {mono, cash, convex};
}

}  // namespace illiq
