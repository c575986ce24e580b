#include "illiq/impact.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "illiq/errors.hpp"
#include "illiq/quadrature.hpp"

namespace illiq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sgn(double y) { return (y > 0.0) - (y < 0.0); }

double checked_shape(const ShapeFunction& h, double y, bool must_be_positive) {
  const double v = h(y);
  if (!std::isfinite(v)) throw InvalidModel(fmt::format("shape '{}' is not finite at y={}", h.name(), y));
  if (must_be_positive && !(v > 0.0)) {
    throw InvalidModel(fmt::format("multiplicative shape '{}' is not positive at y={}", h.name(), y));
  }
  return v;
}

ScenarioVector map_values(const ScenarioVector& x, auto&& fn) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(i, x[i]);
  for (double v : out) {
    if (!std::isfinite(v)) throw InvalidModel("impact model produced a non-finite price");
  }
  return x.with_values(std::move(out));
}

/// Closed-form split integral; returns false when the model has none.
bool closed_form_split(const ImpactModel& model, const ScenarioVector& x, double y, std::vector<double>& out) {
  out.assign(x.size(), 0.0);
  return std::visit(
      overloaded{
          [&](const LinearAdditive& m) {
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = y * x[i] - 0.5 * m.a * y * y;
            return true;
          },
          [&](const StochasticSlope& m) {
            require_same_space(x, m.m);
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = y * x[i] - 0.5 * m.m[i] * y * y;
            return true;
          },
          [&](const SignLinear& m) {
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = y * x[i] - m.theta * std::abs(y) - 0.5 * m.eta * y * y;
            return true;
          },
          [&](const PowerLaw& m) {
            const double tail = m.gamma * std::pow(std::abs(y), m.alpha + 1.0) / (m.alpha + 1.0);
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = y * x[i] - tail;
            return true;
          },
          [&](const ExponentialMultiplicative& m) {
            const double k = m.a * m.horizon;
            const double factor = k == 0.0 ? y : -std::expm1(-k * y) / k;
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = factor * x[i];
            return true;
          },
          [&](const SeparableAdditive&) { return false; },
          [&](const SeparableMultiplicative&) { return false; },
      },
      model);
}

const ShapeFunction* separable_shape(const ImpactModel& model, bool& multiplicative) {
  if (auto* s = std::get_if<SeparableAdditive>(&model)) {
    multiplicative = false;
    return &s->h;
  }
  if (auto* s = std::get_if<SeparableMultiplicative>(&model)) {
    multiplicative = true;
    return &s->h;
  }
  return nullptr;
}

void require_converged(bool converged, double residual, std::size_t panels, double y) {
  if (!converged) {
    throw QuadratureNonConvergence(
        fmt::format("split integral to y={} stopped at {} panels with relative residual {}", y, panels, residual));
  }
}

}  // namespace

ShapeFunction ShapeFunction::additive_linear(double c) {
  return ShapeFunction(fmt::format("linear({})", c), [c](double u) { return c * u; });
}

ShapeFunction ShapeFunction::additive_sqrt(double c) {
  return ShapeFunction(fmt::format("sqrt({})", c), [c](double u) {
    return u >= 0.0 ? c * (std::sqrt(1.0 + u) - 1.0) : c * (1.0 - std::pow(1.0 - u, 1.5)) / 3.0;
  });
}

ShapeFunction ShapeFunction::multiplicative_linear(double c) {
  return ShapeFunction(fmt::format("linear({})", c), [c](double u) { return 1.0 + c * u; });
}

ShapeFunction ShapeFunction::multiplicative_sqrt(double c) {
  return ShapeFunction(fmt::format("sqrt({})", c), [c](double u) { return std::sqrt(1.0 + c * u); });
}

std::string model_name(const ImpactModel& model) {
  return std::visit(overloaded{
                        [](const LinearAdditive& m) { return fmt::format("linear(a={})", m.a); },
                        [](const StochasticSlope&) { return std::string("stochastic_slope"); },
                        [](const SignLinear& m) { return fmt::format("sign_linear(theta={},eta={})", m.theta, m.eta); },
                        [](const PowerLaw& m) { return fmt::format("power_law(gamma={},alpha={})", m.gamma, m.alpha); },
                        [](const ExponentialMultiplicative& m) {
                          return fmt::format("exp_multiplicative(a={},T={})", m.a, m.horizon);
                        },
                        [](const SeparableAdditive& m) { return "separable_additive(" + m.h.name() + ")"; },
                        [](const SeparableMultiplicative& m) { return "separable_multiplicative(" + m.h.name() + ")"; },
                    },
                    model);
}

void validate(const ImpactModel& model) {
  auto finite = [](double v, const char* what) {
    if (!std::isfinite(v)) throw InvalidModel(std::string(what) + " must be finite");
  };
  std::visit(overloaded{
                 [&](const LinearAdditive& m) { finite(m.a, "a"); },
                 [&](const StochasticSlope&) {},
                 [&](const SignLinear& m) {
                   finite(m.theta, "theta");
                   finite(m.eta, "eta");
                 },
                 [&](const PowerLaw& m) {
                   finite(m.gamma, "gamma");
                   if (!(m.alpha > 0.0 && m.alpha < 1.0)) throw InvalidModel("power law alpha must lie in (0,1)");
                 },
                 [&](const ExponentialMultiplicative& m) {
                   finite(m.a, "a");
                   if (!(m.horizon > 0.0) || !std::isfinite(m.horizon)) throw InvalidModel("T must be positive");
                 },
                 [&](const SeparableAdditive& m) { checked_shape(m.h, 0.0, false); },
                 [&](const SeparableMultiplicative& m) { checked_shape(m.h, 0.0, true); },
             },
             model);
}

bool block_exposure_concave(const ImpactModel& model) {
  return !std::holds_alternative<PowerLaw>(model) && !std::holds_alternative<ExponentialMultiplicative>(model);
}

bool has_closed_form_split(const ImpactModel& model) {
  return !std::holds_alternative<SeparableAdditive>(model) && !std::holds_alternative<SeparableMultiplicative>(model);
}

ScenarioVector price_at(const ImpactModel& model, const ScenarioVector& x_tilde, double y) {
  validate(model);
  if (!std::isfinite(y)) throw InvalidParams("position y must be finite");
  if (y == 0.0) return x_tilde;
  return std::visit(
      overloaded{
          [&](const LinearAdditive& m) { return map_values(x_tilde, [&](std::size_t, double x) { return x + m.a * y; }); },
          [&](const StochasticSlope& m) {
            require_same_space(x_tilde, m.m);
            return map_values(x_tilde, [&](std::size_t i, double x) { return x + m.m[i] * y; });
          },
          [&](const SignLinear& m) {
            return map_values(x_tilde, [&](std::size_t, double x) { return x + m.theta * sgn(y) + m.eta * y; });
          },
          [&](const PowerLaw& m) {
            const double shift = m.gamma * sgn(y) * std::pow(std::abs(y), m.alpha);
            return map_values(x_tilde, [&](std::size_t, double x) { return x + shift; });
          },
          [&](const ExponentialMultiplicative& m) {
            const double factor = std::exp(m.a * y * m.horizon);
            return map_values(x_tilde, [&](std::size_t, double x) { return factor * x; });
          },
          [&](const SeparableAdditive& m) {
            const double shift = checked_shape(m.h, y, false);
            return map_values(x_tilde, [&](std::size_t, double x) { return x + shift; });
          },
          [&](const SeparableMultiplicative& m) {
            const double factor = checked_shape(m.h, y, true);
            return map_values(x_tilde, [&](std::size_t, double x) { return factor * x; });
          },
      },
      model);
}

Exposure offsetting_exposure(const ImpactModel& model, const ScenarioVector& x_tilde, double y) {
  return {price_at(model, x_tilde, -y), y, ExposurePolicy::block};
}

Exposure split_exposure(const ImpactModel& model, const ScenarioVector& x_tilde, double y,
                        const Quadrature& quadrature) {
  validate(model);
  if (!std::isfinite(y)) throw InvalidParams("position y must be finite");
  std::vector<double> z;
  if (y == 0.0) {
    z.assign(x_tilde.size(), 0.0);
    return {x_tilde.with_values(std::move(z)), y, ExposurePolicy::split_continuous};
  }
  using Method = Quadrature::Method;
  if (quadrature.method == Method::automatic || quadrature.method == Method::closed_form) {
    if (closed_form_split(model, x_tilde, y, z)) {
      return {x_tilde.with_values(std::move(z)), y, ExposurePolicy::split_continuous};
    }
    if (quadrature.method == Method::closed_form) {
      throw InvalidParams("no closed-form split integral for " + model_name(model));
    }
    // Separable families: only the deterministic shape needs integrating.
    bool multiplicative = false;
    const ShapeFunction* h = separable_shape(model, multiplicative);
    auto r = quad::romberg([&](double u) { return checked_shape(*h, -u, multiplicative); }, 0.0, y,
                           quadrature.rel_tol, quadrature.max_steps);
    require_converged(r.converged, r.residual, r.panels, y);
    z.resize(x_tilde.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = multiplicative ? r.value * x_tilde[i] : y * x_tilde[i] + r.value;
    return {x_tilde.with_values(std::move(z)), y, ExposurePolicy::split_continuous};
  }

  quad::VectorIntegrand integrand = [&](double u, std::span<double> out) {
    const ScenarioVector p = price_at(model, x_tilde, -u);
    std::copy(p.values().begin(), p.values().end(), out.begin());
  };
  if (quadrature.method == Method::fixed) {
    if (quadrature.max_steps < 2) throw InvalidParams("trapezoid needs at least 2 steps");
    z = quad::trapezoid(integrand, x_tilde.size(), 0.0, y, quadrature.max_steps);
  } else {
    auto r = quad::romberg(integrand, x_tilde.size(), 0.0, y, quadrature.rel_tol, quadrature.max_steps);
    require_converged(r.converged, r.residual, r.panels, y);
    z = std::move(r.value);
  }
  return {x_tilde.with_values(std::move(z)), y, ExposurePolicy::split_continuous};
}

Exposure split_exposure_discrete(const ImpactModel& model, const ScenarioVector& x_tilde,
                                 const std::vector<Tranche>& tranches) {
  if (tranches.empty()) throw InvalidParams("at least one tranche is required");
  std::vector<double> z(x_tilde.size(), 0.0);
  double depth = 0.0;
  for (std::size_t j = 0; j < tranches.size(); ++j) {
    const auto& t = tranches[j];
    if (!(t.dy > 0.0) || !std::isfinite(t.dy)) throw InvalidParams(fmt::format("tranche {} has dy <= 0", j));
    if (t.dy > t.cap) throw TrancheCapViolation(fmt::format("tranche {}: dy={} exceeds cap {}", j, t.dy, t.cap));
    depth += t.dy;
    const ScenarioVector p = price_at(model, x_tilde, -depth);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += p[i] * t.dy;
  }
  return {x_tilde.with_values(std::move(z)), depth, ExposurePolicy::split_discrete};
}

double initial_cost(const SupplyCurve& curve, double y, CostPolicy policy) {
  return policy == CostPolicy::block ? y * curve(y) : curve.integral(y);
}

AxiomReport check_impact_monotonicity(const ImpactModel& model, const ScenarioVector& x_tilde,
                              const std::vector<double>& y_grid) {
  if (!std::is_sorted(y_grid.begin(), y_grid.end()) ||
      std::adjacent_find(y_grid.begin(), y_grid.end()) != y_grid.end()) {
    throw InvalidParams("y grid must be strictly increasing");
  }
  AxiomReport report;
  report.axiom = "impact_monotonicity";
  std::vector<ScenarioVector> prices;
  prices.reserve(y_grid.size());
  for (double y : y_grid) prices.push_back(price_at(model, x_tilde, y));

  auto tol = [](double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };
  for (std::size_t k = 0; k + 1 < y_grid.size(); ++k) {
    for (std::size_t i = 0; i < x_tilde.size(); ++i) {
      ++report.pairs_tested;
      const double lo = prices[k][i];
      const double hi = prices[k + 1][i];
      if (hi < lo - tol(lo, hi)) {
        report.record(fmt::format("w{}: X(y={}) > X(y={})", i, y_grid[k], y_grid[k + 1]), lo, hi, lo - hi);
      }
    }
  }
  for (double y : y_grid) {
    if (y < 0.0) continue;
    const ScenarioVector up = price_at(model, x_tilde, y);
    const ScenarioVector down = price_at(model, x_tilde, -y);
    for (std::size_t i = 0; i < x_tilde.size(); ++i) {
      ++report.pairs_tested;
      const double x = x_tilde[i];
      if (down[i] > x + tol(down[i], x)) {
        report.record(fmt::format("w{}: X(-{}) > X~", i, y), down[i], x, down[i] - x);
      }
      if (up[i] < x - tol(up[i], x)) report.record(fmt::format("w{}: X({}) < X~", i, y), up[i], x, x - up[i]);
    }
  }
  return report;
}

AxiomReport check_concavity(const std::function<ScenarioVector(double)>& family, const std::vector<double>& y_grid,
                            double tolerance, bool expected_to_fail) {
  if (y_grid.size() < 3) throw InvalidParams("concavity check needs at least 3 grid points");
  AxiomReport report;
  report.axiom = "midpoint_concavity";
  report.expected_to_fail = expected_to_fail;
  std::vector<ScenarioVector> at;
  at.reserve(y_grid.size());
  for (double y : y_grid) at.push_back(family(y));
  for (std::size_t a = 0; a < y_grid.size(); ++a) {
    for (std::size_t b = a + 1; b < y_grid.size(); ++b) {
      const ScenarioVector mid = family(0.5 * (y_grid[a] + y_grid[b]));
      ++report.pairs_tested;
      for (std::size_t i = 0; i < mid.size(); ++i) {
        const double chord = 0.5 * (at[a][i] + at[b][i]);
        const double tol = tolerance * std::max({1.0, std::abs(chord), std::abs(mid[i])});
        if (mid[i] < chord - tol) {
          report.record(fmt::format("w{}: y={}, v={}", i, y_grid[a], y_grid[b]), mid[i], chord, chord - mid[i]);
        }
      }
    }
  }
  return report;
}

}  // namespace illiq
