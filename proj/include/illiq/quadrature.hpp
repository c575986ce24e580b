#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace illiq::quad {

/// Vector-valued integrand: writes f(u) into `out` (one entry per component).
using VectorIntegrand = std::function<void(double u, std::span<double> out)>;

struct Result {
  std::vector<double> value;
  std::size_t panels = 0;
  bool converged = false;
  /// Largest per-component change of the last Romberg diagonal step,
  /// relative to that component's integral of |f|.
  double residual = 0.0;
};

/// Composite trapezoid rule with exactly `panels` panels on [a, b]. `b < a`
/// gives the signed integral.
std::vector<double> trapezoid(const VectorIntegrand& f, std::size_t dim, double a, double b, std::size_t panels);
double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t panels);

/// Romberg integration: trapezoid step-halving with Richardson
/// extrapolation, stopped once every component of two successive diagonal
/// entries differs by at most rel_tol times the integral of |f|, or when the
/// panel count would exceed max_panels. Sums run in a fixed order.
Result romberg(const VectorIntegrand& f, std::size_t dim, double a, double b, double rel_tol, std::size_t max_panels,
               std::size_t min_levels = 3);

struct ScalarResult {
  double value = 0.0;
  std::size_t panels = 0;
  bool converged = false;
  double residual = 0.0;
};

ScalarResult romberg(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     std::size_t max_panels, std::size_t min_levels = 3);

}  // namespace illiq::quad
