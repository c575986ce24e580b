#include "illiq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace illiq::quad {

std::vector<double> trapezoid(const VectorIntegrand& f, std::size_t dim, double a, double b, std::size_t panels) {
  if (panels == 0) throw std::invalid_argument("trapezoid: need at least one panel");
  std::vector<double> sum(dim, 0.0), buf(dim);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t k = 0; k <= panels; ++k) {
    const double u = (k == panels) ? b : a + h * static_cast<double>(k);
    f(u, buf);
    const double w = (k == 0 || k == panels) ? 0.5 : 1.0;
    for (std::size_t i = 0; i < dim; ++i) sum[i] += w * buf[i];
  }
  for (auto& s : sum) s *= h;
  return sum;
}

double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  VectorIntegrand g = [&](double u, std::span<double> out) { out[0] = f(u); };
  return trapezoid(g, 1, a, b, panels)[0];
}

Result romberg(const VectorIntegrand& f, std::size_t dim, double a, double b, double rel_tol, std::size_t max_panels,
               std::size_t min_levels) {
  Result res;
  res.value.assign(dim, 0.0);
  if (a == b) {
    res.converged = true;
    return res;
  }
  const double width = b - a;
  std::vector<double> buf(dim), trap(dim), abs_trap(dim);
  f(a, buf);
  for (std::size_t i = 0; i < dim; ++i) {
    trap[i] = buf[i];
    abs_trap[i] = std::abs(buf[i]);
  }
  f(b, buf);
  for (std::size_t i = 0; i < dim; ++i) {
    trap[i] = 0.5 * width * (trap[i] + buf[i]);
    abs_trap[i] = 0.5 * std::abs(width) * (abs_trap[i] + std::abs(buf[i]));
  }

  std::vector<std::vector<double>> prev{trap};
  std::size_t panels = 1;
  for (std::size_t level = 1; 2 * panels <= max_panels; ++level) {
    const std::size_t n = 2 * panels;
    const double h = width / static_cast<double>(n);
    std::vector<double> mid(dim, 0.0), abs_mid(dim, 0.0);
    for (std::size_t k = 1; k < n; k += 2) {
      f(a + h * static_cast<double>(k), buf);
      for (std::size_t i = 0; i < dim; ++i) {
        mid[i] += buf[i];
        abs_mid[i] += std::abs(buf[i]);
      }
    }
    std::vector<std::vector<double>> row(level + 1, std::vector<double>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      row[0][i] = 0.5 * prev[0][i] + h * mid[i];
      abs_trap[i] = 0.5 * abs_trap[i] + std::abs(h) * abs_mid[i];
    }
    double factor = 1.0;
    for (std::size_t j = 1; j <= level; ++j) {
      factor *= 4.0;
      for (std::size_t i = 0; i < dim; ++i) {
        row[j][i] = row[j - 1][i] + (row[j - 1][i] - prev[j - 1][i]) / (factor - 1.0);
      }
    }
    panels = n;

    double residual = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double diff = std::abs(row[level][i] - prev[level - 1][i]);
      const double scale = abs_trap[i];
      residual = std::max(residual, scale > 0.0 ? diff / scale : (diff > 0.0 ? INFINITY : 0.0));
    }
    res.value = row[level];
    res.panels = panels;
    res.residual = residual;
    if (level >= min_levels && residual <= rel_tol) {
      res.converged = true;
      return res;
    }
    prev = std::move(row);
  }
  if (panels == 1) res.value = trap;
  return res;
}

ScalarResult romberg(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     std::size_t max_panels, std::size_t min_levels) {
  VectorIntegrand g = [&](double u, std::span<double> out) { out[0] = f(u); };
  Result r = romberg(g, 1, a, b, rel_tol, max_panels, min_levels);
  return {r.value[0], r.panels, r.converged, r.residual};
}

}  // namespace illiq::quad
