#include "illiq/duality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "illiq/errors.hpp"
#include "illiq/kernels.hpp"
#include "illiq/random.hpp"

namespace illiq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> with_infinite_sentinels(const std::vector<double>& v) {
  std::vector<double> out(v);
  for (auto& x : out) {
    if (is_sentinel(x)) x = kInf;
  }
  return out;
}

TensorShape shape_of(const std::vector<std::vector<double>>& axes) {
  TensorShape s;
  for (const auto& a : axes) s.dims.push_back(a.size());
  return s;
}

/// Calls fn(start, stride, length) for every grid line along `axis`.
template <class F>
void for_each_line(const TensorShape& shape, std::size_t axis, F&& fn) {
  const std::size_t stride = shape.stride(axis);
  const std::size_t len = shape.dims[axis];
  const std::size_t outer = shape.size() / (len * stride);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < stride; ++s) fn(o * len * stride + s, stride, len);
  }
}

/// Range of finite-difference slopes along one axis, over all lines.
std::pair<double, double> slope_range(const GridFunction& f, std::size_t axis) {
  const TensorShape shape = shape_of(f.axes);
  const auto& y = f.axes[axis];
  double lo = kInf;
  double hi = -kInf;
  for_each_line(shape, axis, [&](std::size_t start, std::size_t stride, std::size_t len) {
    std::size_t prev = len;
    for (std::size_t i = 0; i < len; ++i) {
      const double v = f.values[start + i * stride];
      if (is_sentinel(v)) continue;
      if (prev != len) {
        const double s = (v - f.values[start + prev * stride]) / (y[i] - y[prev]);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      prev = i;
    }
  });
  if (lo > hi) lo = hi = 0.0;
  return {lo, hi};
}

std::vector<double> u_axis(double lo, double hi, std::size_t points) {
  std::vector<double> u = linspace(lo - 1.0, hi + 1.0, std::max<std::size_t>(points, 2));
  u.push_back(lo);
  u.push_back(hi);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

std::vector<double> dirichlet(rng::CounterStream& s, std::size_t n) {
  std::vector<double> q(n);
  double sum = 0.0;
  for (auto& x : q) {
    x = -std::log(s.uniform());
    sum += x;
  }
  for (auto& x : q) x /= sum;
  return q;
}

void require_absolute_continuity(std::span<const double> q, const ProbabilityVector& p) {
  if (q.size() != p.size()) throw SpaceMismatch("Q and P differ in length");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0 && p[i] == 0.0) {
      throw AbsoluteContinuityViolation(fmt::format("Q puts mass {} on scenario {} where P is 0", q[i], i));
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GridFunction GridFunction::line(std::vector<double> grid, std::vector<double> values) {
  GridFunction f{{std::move(grid)}, std::move(values)};
  f.validate();
  return f;
}

void GridFunction::validate() const {
  if (axes.empty() || values.empty()) throw EmptyGrid("grid function has no points");
  std::size_t n = 1;
  for (const auto& a : axes) {
    if (a.size() < 2) throw EmptyGrid("every axis needs at least two points");
    for (std::size_t i = 1; i < a.size(); ++i) {
      if (!(a[i] > a[i - 1])) throw InvalidParams("grid axis must be strictly increasing");
    }
    n *= a.size();
  }
  if (n != values.size()) throw InvalidParams("value count does not match the grid");
}

double GridFunction::interpolate(std::span<const double> point) const {
  if (point.size() != axes.size()) throw InvalidParams("point dimension does not match the grid");
  const TensorShape shape = shape_of(axes);
  std::vector<std::size_t> cell(axes.size());
  std::vector<double> t(axes.size());
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const auto& a = axes[k];
    const double slack = 1e-12 * std::max({1.0, std::abs(a.front()), std::abs(a.back())});
    const double x = point[k];
    if (!(x >= a.front() - slack && x <= a.back() + slack)) {
      throw OutOfGridSpan(fmt::format("coordinate {} on axis {} outside [{}, {}]", x, k, a.front(), a.back()));
    }
    const double xc = std::clamp(x, a.front(), a.back());
    auto it = std::upper_bound(a.begin(), a.end(), xc);
    std::size_t i = it == a.begin() ? 0 : static_cast<std::size_t>(it - a.begin()) - 1;
    i = std::min(i, a.size() - 2);
    cell[k] = i;
    t[k] = (xc - a[i]) / (a[i + 1] - a[i]);
  }
  double sum = 0.0;
  const std::size_t corners = std::size_t{1} << axes.size();
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const bool upper = (c >> k) & 1U;
      w *= upper ? t[k] : 1.0 - t[k];
      flat += (cell[k] + (upper ? 1 : 0)) * shape.stride(k);
    }
    if (w != 0.0) sum += w * values[flat];
  }
  return sum;
}

std::vector<double> linspace(double from, double to, std::size_t count) {
  if (count < 2) throw InvalidParams("linspace needs at least two points");
  std::vector<double> v(count);
  const double step = (to - from) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) v[i] = from + step * static_cast<double>(i);
  v.back() = to;
  return v;
}

bool midpoint_convex(const GridFunction& f, double tolerance) {
  f.validate();
  const TensorShape shape = shape_of(f.axes);
  bool ok = true;
  for (std::size_t axis = 0; axis < f.dimension() && ok; ++axis) {
    const auto& y = f.axes[axis];
    for_each_line(shape, axis, [&](std::size_t start, std::size_t stride, std::size_t len) {
      for (std::size_t i = 1; i + 1 < len && ok; ++i) {
        const double a = f.values[start + (i - 1) * stride];
        const double b = f.values[start + i * stride];
        const double c = f.values[start + (i + 1) * stride];
        if (is_sentinel(a) || is_sentinel(b) || is_sentinel(c)) continue;
        const double chord = ((y[i + 1] - y[i]) * a + (y[i] - y[i - 1]) * c) / (y[i + 1] - y[i - 1]);
        if (b > chord + tolerance * std::max({1.0, std::abs(a), std::abs(b), std::abs(c)})) ok = false;
      }
    });
  }
  return ok;
}

GridFunction conjugate_on(const GridFunction& f, std::vector<std::vector<double>> u_axes) {
  f.validate();
  if (u_axes.size() != f.dimension()) throw InvalidParams("u axes do not match the grid dimension");
  GridFunction out{std::move(u_axes), {}};
  out.values.resize(shape_of(out.axes).size());
  parallel::conjugate(f.axes, with_infinite_sentinels(f.values), out.axes, out.values);
  return out;
}

GridFunction conjugate(const GridFunction& f, const ConjugateOptions& options) {
  f.validate();
  const std::size_t n = f.dimension();
  if (n > 3) throw InvalidParams("conjugation is limited to n <= 3");
  std::vector<std::vector<double>> u_axes;
  for (std::size_t k = 0; k < n; ++k) {
    auto [lo, hi] = slope_range(f, k);
    u_axes.push_back(u_axis(lo, hi, n == 1 ? options.points_1d : options.points_per_axis));
  }
  if (n != 1) return conjugate_on(f, std::move(u_axes));

  // End slopes of the lower convex hull of the finite samples. They go on the
  // u-axis too: for a concave f the hull is one chord and f* is finite only there.
  const auto& y = f.axes[0];
  std::vector<std::size_t> finite;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!is_sentinel(f.values[i])) finite.push_back(i);
  }
  if (finite.size() < 2) return conjugate_on(f, std::move(u_axes));
  const std::size_t first = finite.front();
  const std::size_t last = finite.back();
  double s_lo = kInf;
  double s_hi = -kInf;
  for (std::size_t i : finite) {
    if (i != first) s_lo = std::min(s_lo, (f.values[i] - f.values[first]) / (y[i] - y[first]));
    if (i != last) s_hi = std::max(s_hi, (f.values[last] - f.values[i]) / (y[last] - y[i]));
  }
  auto& u = u_axes[0];
  u.push_back(s_lo);
  u.push_back(s_hi);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());

  GridFunction out = conjugate_on(f, std::move(u_axes));
  const double tol_lo = 1e-9 * std::max(1.0, std::abs(s_lo));
  const double tol_hi = 1e-9 * std::max(1.0, std::abs(s_hi));
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double uj = out.axes[0][j];
    if (uj < s_lo - tol_lo || uj > s_hi + tol_hi) out.values[j] = kConjugateSentinel;
  }
  return out;
}

GridFunction biconjugate(const GridFunction& f_star, const std::vector<std::vector<double>>& y_axes) {
  return conjugate_on(f_star, y_axes);
}

ConjugatePair biconjugate_check(const GridFunction& f, const ConjugateOptions& options) {
  ConjugatePair pair{f, conjugate(f, options), {}, 0.0, midpoint_convex(f), 0.0};
  pair.f_star_star = biconjugate(pair.f_star, f.axes);

  const TensorShape shape = shape_of(f.axes);
  const std::size_t n = f.dimension();
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    bool interior = true;
    std::size_t rem = flat;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = rem / shape.stride(k);
      rem %= shape.stride(k);
      if (idx == 0 || idx + 1 == f.axes[k].size()) interior = false;
    }
    if (!interior) continue;
    pair.max_recovery_error = std::max(pair.max_recovery_error, std::abs(pair.f_star_star.values[flat] - f.values[flat]));
  }

  double c = 0.0;
  if (n == 1) {
    for (std::size_t j = 0; j < pair.f_star.size(); ++j) {
      if (!is_sentinel(pair.f_star.values[j])) c = std::max(c, std::abs(pair.f_star.axes[0][j]));
    }
  } else {
    for (const auto& a : pair.f_star.axes) c += std::max(std::abs(a.front()), std::abs(a.back()));
  }
  double dy = 0.0;
  for (const auto& a : f.axes) {
    for (std::size_t i = 1; i < a.size(); ++i) dy = std::max(dy, a[i] - a[i - 1]);
  }
  pair.grid_bound = 2.0 * c * dy;
  return pair;
}

double beta_hat(const GridFunction& f, double h, double x, Side side) {
  return beta_hat(f, std::span<const double>(&h, 1), std::span<const double>(&x, 1), side);
}

double beta_hat(const GridFunction& f, std::span<const double> h, std::span<const double> x, Side side) {
  if (h.size() != f.dimension() || x.size() != f.dimension()) {
    throw InvalidParams("beta_hat: h and x must match the grid dimension");
  }
  std::vector<double> y(h.size());
  double mean_x = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    y[i] = h[i] - x[i];
    mean_x += x[i];
  }
  mean_x /= static_cast<double>(h.size());
  const double v = f.interpolate(y);
  return side == Side::long_side ? v + mean_x : v - mean_x;
}

LipschitzReport lipschitz_check(const GridFunction& f, std::size_t trials, std::uint64_t seed, Side side,
                                double x_range) {
  f.validate();
  if (trials == 0) throw InvalidParams("trials must be at least 1");
  const std::size_t n = f.dimension();
  if (x_range <= 0.0) {
    double span = kInf;
    for (const auto& a : f.axes) span = std::min(span, a.back() - a.front());
    x_range = 0.25 * span;
  }
  LipschitzReport r;
  r.dimension = n;
  r.bound = std::sqrt(2.0 * static_cast<double>(n));
  const std::uint64_t stream = rng::derive_seed(seed, 0x6c6970);
  std::vector<double> h1(n), x1(n), h2(n), x2(n);
  for (std::size_t t = 0; t < trials; ++t) {
    rng::CounterStream s(stream, 4 * n * t);
    auto draw = [&](std::vector<double>& h, std::vector<double>& x) {
      for (std::size_t k = 0; k < n; ++k) {
        const double y = s.uniform(f.axes[k].front(), f.axes[k].back());
        x[k] = s.uniform(-x_range, x_range);
        h[k] = y + x[k];
      }
    };
    draw(h1, x1);
    draw(h2, x2);
    double dist2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      dist2 += (h1[k] - h2[k]) * (h1[k] - h2[k]) + (x1[k] - x2[k]) * (x1[k] - x2[k]);
    }
    if (dist2 == 0.0) continue;
    double b1 = 0.0;
    double b2 = 0.0;
    try {
      b1 = beta_hat(f, h1, x1, side);
      b2 = beta_hat(f, h2, x2, side);
    } catch (const OutOfGridSpan&) {
      continue;  // h - x rounded just past the grid edge
    }
    ++r.pairs;
    r.max_ratio = std::max(r.max_ratio, std::abs(b1 - b2) / std::sqrt(dist2));
  }
  r.pass = r.max_ratio <= r.bound + 1e-9;
  return r;
}

PenaltyEvaluation penalty_alpha(const RiskFunctional& f, const std::optional<ProbabilityVector>& p,
                                std::span<const double> q_in, const std::vector<std::vector<double>>& probes) {
  validate(f);
  const ProbabilityVector q{std::vector<double>(q_in.begin(), q_in.end())};
  PenaltyEvaluation out;
  out.q.assign(q_in.begin(), q_in.end());
  if (requires_probability(f)) {
    if (!p) throw MissingProbability(functional_name(f) + " needs a probability vector");
    require_absolute_continuity(q_in, *p);
  }
  if (std::holds_alternative<WorstCase>(f)) {
    out.alpha = 0.0;
  } else if (auto* avar = std::get_if<AverageValueAtRisk>(&f)) {
    double ratio = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] > 0.0) ratio = std::max(ratio, q[i] / (*p)[i]);
    }
    out.alpha = ratio <= (1.0 + 1e-12) / avar->delta ? 0.0 : kInf;
  } else if (auto* ent = std::get_if<Entropic>(&f)) {
    double kl = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] > 0.0) kl += q[i] * std::log(q[i] / (*p)[i]);
    }
    out.alpha = std::max(kl, 0.0) / ent->lambda;
  } else {
    out.lower_bound = true;
    out.alpha = 0.0;  // Z = 0 gives E_Q(0) - rho(0) = 0
    for (const auto& z : probes) {
      if (z.size() != q.size()) throw SpaceMismatch("probe length differs from Q");
      out.alpha = std::max(out.alpha, -expectation(q, z) - rho(f, z, p ? &*p : nullptr));
    }
  }
  return out;
}

double evaluate_dual(const RiskFunctional& f, const std::optional<ProbabilityVector>& p, std::span<const double> z,
                     std::span<const double> q) {
  const PenaltyEvaluation a = penalty_alpha(f, p, q);
  if (std::isinf(a.alpha)) return -kInf;
  return -dot(q, z) - a.alpha;
}

std::vector<double> dual_maximizer(const RiskFunctional& f, const std::optional<ProbabilityVector>& p,
                                   std::span<const double> z) {
  const std::size_t n = z.size();
  std::vector<double> q(n, 0.0);
  if (std::holds_alternative<WorstCase>(f)) {
    q[static_cast<std::size_t>(std::min_element(z.begin(), z.end()) - z.begin())] = 1.0;
    return q;
  }
  if (!p) throw MissingProbability(functional_name(f) + " needs a probability vector");
  if (auto* ent = std::get_if<Entropic>(&f)) {
    double shift = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if ((*p)[i] > 0.0) shift = std::max(shift, -ent->lambda * z[i]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      q[i] = (*p)[i] > 0.0 ? (*p)[i] * std::exp(-ent->lambda * z[i] - shift) : 0.0;
      sum += q[i];
    }
    for (auto& x : q) x /= sum;
    return q;
  }
  if (auto* avar = std::get_if<AverageValueAtRisk>(&f)) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if ((*p)[i] > 0.0) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
    double mass = 0.0;
    for (std::size_t i : idx) {
      const double take = std::min((*p)[i], avar->delta - mass);
      if (take <= 0.0) break;
      q[i] = take / avar->delta;
      mass += take;
    }
    return q;
  }
  throw InvalidParams("no closed-form dual maximizer for " + functional_name(f));
}

DualReport dual_check(const RiskFunctional& f, const std::optional<ProbabilityVector>& p, std::span<const double> z,
                      std::size_t n_samples, std::uint64_t seed, double tolerance) {
  if (std::holds_alternative<ValueAtRisk>(f)) throw InvalidParams("dual check needs a closed-form penalty; VaR has none");
  const std::size_t n = z.size();
  DualReport r;
  r.beta_value = rho(f, z, p ? &*p : nullptr);
  r.dual_sup = -kInf;
  auto consider = [&](const std::vector<double>& q, const std::string& label) {
    const double v = evaluate_dual(f, p, z, q);
    if (v > r.dual_sup) {
      r.dual_sup = v;
      r.attained_by = label;
    }
    return v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (requires_probability(f) && (*p)[i] == 0.0) continue;
    std::vector<double> q(n, 0.0);
    q[i] = 1.0;
    consider(q, fmt::format("vertex {}", i));
  }
  consider(dual_maximizer(f, p, z), "closed-form maximizer");

  const auto* avar = std::get_if<AverageValueAtRisk>(&f);
  const std::uint64_t stream = rng::derive_seed(seed, 0x6475616c);
  for (std::size_t k = 0; k < n_samples; ++k) {
    rng::CounterStream s(stream, n * k);
    std::vector<double> q = dirichlet(s, n);
    if (p && requires_probability(f)) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if ((*p)[i] == 0.0) q[i] = 0.0;
        sum += q[i];
      }
      for (auto& x : q) x /= sum;
    }
    if (avar) {
      // Pull Q toward P until dQ/dP <= 1/delta so the sample is feasible.
      double t = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double cap = (*p)[i] / avar->delta;
        if (q[i] > cap) t = std::min(t, (cap - (*p)[i]) / (q[i] - (*p)[i]));
      }
      t *= 1.0 - 1e-12;
      for (std::size_t i = 0; i < n; ++i) q[i] = (*p)[i] + t * (q[i] - (*p)[i]);
    }
    const double v = consider(q, fmt::format("random {}", k));
    ++r.random_samples;
    r.max_random = std::max(r.max_random, v);
    if (v > r.beta_value + tolerance) ++r.random_above_primal;
  }
  r.gap = std::abs(r.dual_sup - r.beta_value);
  r.pass = r.gap <= tolerance && r.random_above_primal == 0;
  return r;
}

GridFunction build_f(const FConfig& config, std::vector<double> grid) {
  if (grid.empty()) throw EmptyGrid("build_f needs a grid");
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) throw InvalidParams("build_f grid must contain 0");
  GridFunction f{{std::move(grid)}, {}};
  const auto& y = f.axes[0];
  f.values.resize(y.size());
  parallel::for_each_index(y.size(), [&](std::size_t i) {
    switch (config.kind) {
      case FKind::block:
        f.values[i] = rho(config.rho, offsetting_exposure(config.model, config.x_tilde, y[i]).z, config.p);
        break;
      case FKind::split:
        f.values[i] = rho(config.rho, split_exposure(config.model, config.x_tilde, y[i], config.quadrature).z, config.p);
        break;
      case FKind::short_side:
        f.values[i] = rho(config.rho, -1.0 * offsetting_exposure(config.model, config.x_tilde, y[i]).z, config.p);
        break;
    }
  });
  f.validate();
  return f;
}

GridFunction build_f_portfolio(const std::vector<PortfolioAsset>& assets, const RiskFunctional& rho_fn,
                               const std::optional<ProbabilityVector>& p, FKind kind,
                               std::vector<std::vector<double>> axes, const Quadrature& quadrature) {
  const std::size_t n = assets.size();
  if (n == 0 || n > 3) throw InvalidParams("portfolio conjugation supports 1 to 3 assets");
  if (axes.size() != n) throw InvalidParams("one grid axis per asset is required");
  if (kind == FKind::short_side) throw InvalidParams("portfolio grids are long-side only");
  for (const auto& a : assets) require_same_space(assets.front().x_tilde, a.x_tilde);

  // Per-asset exposures at every axis value, summed per tensor point below.
  std::vector<std::vector<ScenarioVector>> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (double y : axes[k]) {
      z[k].push_back(kind == FKind::block ? offsetting_exposure(assets[k].model, assets[k].x_tilde, y).z
                                          : split_exposure(assets[k].model, assets[k].x_tilde, y, quadrature).z);
    }
  }
  GridFunction f{std::move(axes), {}};
  const TensorShape shape = shape_of(f.axes);
  f.values.resize(shape.size());
  const std::size_t m = assets.front().x_tilde.size();
  parallel::for_each_index(shape.size(), [&](std::size_t flat) {
    std::vector<double> total(m, 0.0);
    std::size_t rem = flat;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = rem / shape.stride(k);
      rem %= shape.stride(k);
      const auto& zk = z[k][idx];
      for (std::size_t i = 0; i < m; ++i) total[i] += zk[i];
    }
    f.values[flat] = rho(rho_fn, total, p ? &*p : nullptr);
  });
  f.validate();
  return f;
}

}  // namespace illiq
