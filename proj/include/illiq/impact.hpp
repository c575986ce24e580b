#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "illiq/report.hpp"
#include "illiq/scenario.hpp"

namespace illiq {

/// Deterministic shape h(u) used by the separable impact families.
class ShapeFunction {
 public:
  ShapeFunction(std::string name, std::function<double(double)> fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  /// c*u.
  static ShapeFunction additive_linear(double c);
  /// c*(sqrt(1+u)-1) for u >= 0, continued for u < 0 by c*(1-(1-u)^1.5)/3 so
  /// that h stays increasing, concave and twice differentiable on all of R.
  static ShapeFunction additive_sqrt(double c);
  /// 1 + c*u; positive only for u > -1/c.
  static ShapeFunction multiplicative_linear(double c);
  /// sqrt(1 + c*u); defined for u >= -1/c.
  static ShapeFunction multiplicative_sqrt(double c);

  double operator()(double u) const { return fn_(u); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::function<double(double)> fn_;
};

struct LinearAdditive {
  double a = 0.0;
};
/// X~ + M(w) y with a per-scenario slope.
struct StochasticSlope {
  ScenarioVector m;
};
/// X~ + theta*sgn(y) + eta*y, sgn(0) = 0.
struct SignLinear {
  double theta = 0.0;
  double eta = 0.0;
};
/// X~ + gamma*sgn(y)*|y|^alpha.
struct PowerLaw {
  double gamma = 0.0;
  double alpha = 0.5;
};
/// exp(a*y*T) * X~.
struct ExponentialMultiplicative {
  double a = 0.0;
  double horizon = 1.0;
};
/// X~ + h(y).
struct SeparableAdditive {
  ShapeFunction h;
};
/// h(y) * X~.
struct SeparableMultiplicative {
  ShapeFunction h;
};

using ImpactModel = std::variant<LinearAdditive, StochasticSlope, SignLinear, PowerLaw, ExponentialMultiplicative,
                                 SeparableAdditive, SeparableMultiplicative>;

std::string model_name(const ImpactModel& model);

/// Throws InvalidModel for structurally broken parameters (non-finite
/// values, alpha outside (0,1), T <= 0). Sign conditions such as a > 0 are
/// not enforced here; check_impact_monotonicity reports them.
void validate(const ImpactModel& model);

/// Whether y -> X_T(w,-y) is concave for y >= 0 whenever X~ > 0. False for
/// the power law and the exponential form, whose perturbations are convex.
bool block_exposure_concave(const ImpactModel& model);

/// Whether a closed-form split integral exists for the model.
bool has_closed_form_split(const ImpactModel& model);

/// Initial supply curve X_0(y) = base + slope*y.
struct SupplyCurve {
  double base = 1.0;
  double slope = 0.0;

  double operator()(double y) const { return base + slope * y; }
  /// Integral of X_0 over [0, y].
  double integral(double y) const { return y * base + 0.5 * slope * y * y; }
};

enum class ExposurePolicy { block, split_continuous, split_discrete };

struct Exposure {
  ScenarioVector z;
  double y = 0.0;
  ExposurePolicy policy = ExposurePolicy::block;
};

struct Quadrature {
  enum class Method {
    automatic,    ///< closed form when available, Romberg otherwise
    closed_form,  ///< closed form or InvalidParams
    romberg,      ///< Romberg on the full integrand, even if a closed form exists
    fixed         ///< composite trapezoid with exactly max_steps panels
  };
  Method method = Method::automatic;
  double rel_tol = 1e-9;
  std::size_t max_steps = std::size_t{1} << 20;

  static Quadrature trapezoid(std::size_t steps) { return {Method::fixed, 0.0, steps}; }
  static Quadrature adaptive(std::size_t cap = std::size_t{1} << 20) { return {Method::romberg, 1e-9, cap}; }
};

struct Tranche {
  double dy = 0.0;
  double cap = std::numeric_limits<double>::infinity();
};

/// X_T(w, y) per scenario; y = 0 returns x_tilde unchanged.
ScenarioVector price_at(const ImpactModel& model, const ScenarioVector& x_tilde, double y);

/// Block offsetting exposure Z_y = X_T(w, -y).
Exposure offsetting_exposure(const ImpactModel& model, const ScenarioVector& x_tilde, double y);

/// Z_y = integral over [0, y] of X_T(w, -u) du (signed for y < 0).
Exposure split_exposure(const ImpactModel& model, const ScenarioVector& x_tilde, double y,
                        const Quadrature& quadrature = {});

/// Z = sum_j X_T(w, -y_j) dy_j with y_j the cumulative depth after tranche j.
Exposure split_exposure_discrete(const ImpactModel& model, const ScenarioVector& x_tilde,
                                 const std::vector<Tranche>& tranches);

enum class CostPolicy { block, split };

/// block: y*X_0(y); split: integral of X_0 over [0, y].
double initial_cost(const SupplyCurve& curve, double y, CostPolicy policy);

/// Per-scenario monotonicity of y -> X_T(w,y) over the grid and the sandwich
/// X_T(w,-y) <= X~ <= X_T(w,y) for y >= 0.
AxiomReport check_impact_monotonicity(const ImpactModel& model, const ScenarioVector& x_tilde,
                              const std::vector<double>& y_grid);

/// Midpoint concavity Z_{(y+v)/2} >= (Z_y + Z_v)/2 - tol over all grid pairs,
/// tol scaled by max(1, |Z|).
AxiomReport check_concavity(const std::function<ScenarioVector(double)>& family, const std::vector<double>& y_grid,
                            double tolerance = 1e-9, bool expected_to_fail = false);

}  // namespace illiq
