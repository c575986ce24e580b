#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "illiq/impact.hpp"
#include "illiq/measures.hpp"
#include "illiq/riskmeasure.hpp"
#include "illiq/scenario.hpp"

namespace illiq {

/// Marks conjugate values that are +infinity (slope outside the range of f).
inline constexpr double kConjugateSentinel = std::numeric_limits<double>::max();
inline bool is_sentinel(double v) { return v == kConjugateSentinel; }

/// Samples of a function on a tensor grid (row-major, axis 0 slowest).
struct GridFunction {
  std::vector<std::vector<double>> axes;
  std::vector<double> values;

  static GridFunction line(std::vector<double> grid, std::vector<double> values);

  std::size_t dimension() const { return axes.size(); }
  std::size_t size() const { return values.size(); }
  const std::vector<double>& grid() const { return axes.front(); }

  /// Throws EmptyGrid / InvalidParams on malformed grids.
  void validate() const;

  /// Multilinear interpolation; OutOfGridSpan outside the box.
  double interpolate(std::span<const double> point) const;
  double interpolate(double y) const { return interpolate(std::span<const double>(&y, 1)); }
};

/// Uniform grid of `count` points on [from, to].
std::vector<double> linspace(double from, double to, std::size_t count);

/// Discrete convexity along every grid line: each value lies on or below the
/// chord of its two neighbours, up to tolerance * max(1, |values|).
/// Sentinel entries are skipped.
bool midpoint_convex(const GridFunction& f, double tolerance = 1e-9);

struct ConjugateOptions {
  std::size_t points_1d = 4096;
  std::size_t points_per_axis = 256;
};

/// f*(u) = max over grid points of <u,y> - f(y).
///
/// The u-grid spans [min slope - 1, max slope + 1] of f's finite differences
/// on each axis, with the extreme slopes inserted exactly. In one dimension,
/// u outside the end slopes of the lower convex hull gets kConjugateSentinel.
/// In higher dimensions the transform is restricted to the box and carries no
/// sentinels.
GridFunction conjugate(const GridFunction& f, const ConjugateOptions& options = {});

/// Transform on caller-chosen u axes, without sentinels.
GridFunction conjugate_on(const GridFunction& f, std::vector<std::vector<double>> u_axes);

/// max over non-sentinel u of <u,y> - f_star(u), evaluated on `y_axes`.
GridFunction biconjugate(const GridFunction& f_star, const std::vector<std::vector<double>>& y_axes);

struct ConjugatePair {
  GridFunction f;
  GridFunction f_star;
  GridFunction f_star_star;
  /// max |f** - f| over interior grid points.
  double max_recovery_error = 0.0;
  bool f_convex = true;
  /// 2 * C * dy with C the largest |u| (1-norm in n-D) carrying a finite
  /// conjugate and dy the largest grid step.
  double grid_bound = 0.0;
};

ConjugatePair biconjugate_check(const GridFunction& f, const ConjugateOptions& options = {});

enum class Side { long_side, short_side };

/// long: f(h - x) + x; short: g(h - x) - x. In n dimensions x enters through
/// its mean, so shifting h and x by m*e shifts the value by m.
double beta_hat(const GridFunction& f, double h, double x, Side side = Side::long_side);
double beta_hat(const GridFunction& f, std::span<const double> h, std::span<const double> x,
                Side side = Side::long_side);

struct LipschitzReport {
  std::size_t dimension = 1;
  std::size_t pairs = 0;
  double max_ratio = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Largest |b(p) - b(q)| / |p - q|_2 over random pairs p = (h, x) in R^{2n}
/// with h - x inside the grid and |x_i| <= x_range. Passes iff the ratio is
/// at most sqrt(2n) + 1e-9. x_range <= 0 picks a quarter of the narrowest
/// axis span.
LipschitzReport lipschitz_check(const GridFunction& f, std::size_t trials, std::uint64_t seed,
                                Side side = Side::long_side, double x_range = 0.0);

struct PenaltyEvaluation {
  std::vector<double> q;
  double alpha = 0.0;  // +infinity allowed
  /// True when alpha is only a probe maximum (no closed form).
  bool lower_bound = false;
};

/// alpha(Q) = sup_Z { E_Q(-Z) - rho(Z) }. Closed forms for worst case, AVaR
/// and entropic; VaR falls back to the probe set (always including Z = 0).
PenaltyEvaluation penalty_alpha(const RiskFunctional& f, const std::optional<ProbabilityVector>& p,
                                std::span<const double> q, const std::vector<std::vector<double>>& probes = {});

/// E_Q(-Z) - alpha(Q); -infinity when alpha is infinite.
double evaluate_dual(const RiskFunctional& f, const std::optional<ProbabilityVector>& p, std::span<const double> z,
                     std::span<const double> q);

/// The measure attaining the sup: argmin vertex (worst case), p e^{-lambda Z}
/// normalised (entropic), the tail measure p/delta (AVaR).
std::vector<double> dual_maximizer(const RiskFunctional& f, const std::optional<ProbabilityVector>& p,
                                   std::span<const double> z);

struct DualReport {
  double beta_value = 0.0;
  double dual_sup = 0.0;
  double gap = 0.0;
  std::string attained_by;
  std::size_t random_samples = 0;
  std::size_t random_above_primal = 0;
  double max_random = -std::numeric_limits<double>::infinity();
  bool pass = false;
};

/// Sup of E_Q(-Z) - alpha(Q) over simplex vertices, the closed-form maximizer
/// and n_samples random Q. Passes iff |sup - rho(Z)| <= tolerance and no
/// random Q exceeds rho(Z) + tolerance. VaR is rejected (no closed-form alpha).
DualReport dual_check(const RiskFunctional& f, const std::optional<ProbabilityVector>& p, std::span<const double> z,
                      std::size_t n_samples, std::uint64_t seed, double tolerance = 1e-9);

enum class FKind {
  block,  ///< f(y) = rho(Z_y)
  split,  ///< f(y) = rho(integral of X_T(w,-u) over [0,y])
  short_side  ///< g(y) = rho(-Z_y)
};

struct FConfig {
  ImpactModel model;
  ScenarioVector x_tilde;
  RiskFunctional rho;
  std::optional<ProbabilityVector> p;
  FKind kind = FKind::block;
  Quadrature quadrature = {};
};

/// Samples f (or g) on a grid that must contain 0.
GridFunction build_f(const FConfig& config, std::vector<double> grid);

/// f(y) = rho(sum_i Z^i_{y_i}) on a tensor grid, n <= 3.
GridFunction build_f_portfolio(const std::vector<PortfolioAsset>& assets, const RiskFunctional& rho_fn,
                               const std::optional<ProbabilityVector>& p, FKind kind,
                               std::vector<std::vector<double>> axes, const Quadrature& quadrature = {});

}  // namespace illiq
