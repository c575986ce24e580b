#include "illiq/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "illiq/random.hpp"

namespace illiq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> dims_of(const std::vector<std::vector<double>>& axes) {
  std::vector<std::size_t> dims;
  dims.reserve(axes.size());
  for (const auto& a : axes) dims.push_back(a.size());
  return dims;
}

void check_shapes(const std::vector<std::vector<double>>& y_axes, std::span<const double> f,
                  const std::vector<std::vector<double>>& u_axes, std::span<double> out) {
  if (y_axes.empty() || y_axes.size() != u_axes.size()) {
    throw std::invalid_argument("conjugate: axis count mismatch");
  }
  if (TensorShape{dims_of(y_axes)}.size() != f.size() || TensorShape{dims_of(u_axes)}.size() != out.size()) {
    throw std::invalid_argument("conjugate: value array does not match grid");
  }
}

}  // namespace

std::size_t TensorShape::size() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::size_t TensorShape::stride(std::size_t axis) const {
  std::size_t s = 1;
  for (std::size_t k = axis + 1; k < dims.size(); ++k) s *= dims[k];
  return s;
}

namespace serial {

void standard_normals(std::uint64_t seed, std::uint64_t first_counter, std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = rng::standard_normal(seed, first_counter + k);
}

void conjugate(const std::vector<std::vector<double>>& y_axes, std::span<const double> f,
               const std::vector<std::vector<double>>& u_axes, std::span<double> out) {
  check_shapes(y_axes, f, u_axes, out);
  const std::size_t n = y_axes.size();
  const TensorShape ys{dims_of(y_axes)};
  const TensorShape us{dims_of(u_axes)};
  std::vector<std::size_t> ui(n), yi(n);
  for (std::size_t a = 0; a < out.size(); ++a) {
    std::size_t rem = a;
    for (std::size_t k = 0; k < n; ++k) {
      ui[k] = rem / us.stride(k);
      rem %= us.stride(k);
    }
    double best = -kInf;
    for (std::size_t b = 0; b < f.size(); ++b) {
      if (f[b] == kInf) continue;
      std::size_t r = b;
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        yi[k] = r / ys.stride(k);
        r %= ys.stride(k);
        dot += u_axes[k][ui[k]] * y_axes[k][yi[k]];
      }
      best = std::max(best, dot - f[b]);
    }
    out[a] = best;
  }
}

}  // namespace serial

namespace detail {

void conjugate_line_hull(std::span<const double> y, std::span<const double> f, std::span<const double> u,
                         std::span<double> out, std::vector<std::size_t>& hull) {
  hull.clear();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (f[i] == kInf) continue;
    // Lower hull, monotone chain: drop the last vertex while it lies on or
    // above the chord from its predecessor to the new point.
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      const double cross = (f[b] - f[a]) * (y[i] - y[a]) - (f[i] - f[a]) * (y[b] - y[a]);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  if (hull.empty()) {
    std::fill(out.begin(), out.end(), -kInf);
    return;
  }
  // The maximiser index is non-decreasing in u; walk the hull once.
  std::size_t k = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double uj = u[j];
    while (k + 1 < hull.size()) {
      const std::size_t a = hull[k];
      const std::size_t b = hull[k + 1];
      if (uj * y[b] - f[b] >= uj * y[a] - f[a]) {
        ++k;
      } else {
        break;
      }
    }
    out[j] = uj * y[hull[k]] - f[hull[k]];
  }
}

}  // namespace detail

namespace parallel {

void standard_normals(std::uint64_t seed, std::uint64_t first_counter, std::span<double> out) {
  for_each_index(out.size(), [&](std::size_t k) { out[k] = rng::standard_normal(seed, first_counter + k); });
}

void conjugate(const std::vector<std::vector<double>>& y_axes, std::span<const double> f,
               const std::vector<std::vector<double>>& u_axes, std::span<double> out) {
  check_shapes(y_axes, f, u_axes, out);
  const std::size_t n = y_axes.size();

  // A_1 = conj_1(f); A_k = conj_k(-A_{k-1}); f* = A_n.
  std::vector<std::size_t> dims = dims_of(y_axes);
  std::vector<double> current(f.begin(), f.end());
  for (std::size_t axis = 0; axis < n; ++axis) {
    const TensorShape in_shape{dims};
    std::vector<std::size_t> out_dims = dims;
    out_dims[axis] = u_axes[axis].size();
    const TensorShape out_shape{out_dims};

    const std::size_t stride = in_shape.stride(axis);  // identical in both shapes
    const std::size_t len_in = dims[axis];
    const std::size_t len_out = out_dims[axis];
    const std::size_t outer = in_shape.size() / (len_in * stride);
    const std::size_t lines = outer * stride;
    const bool negate = axis > 0;

    std::vector<double> next(out_shape.size());
    const auto& y = y_axes[axis];
    const auto& u = u_axes[axis];
    const auto count = static_cast<std::ptrdiff_t>(lines);
#pragma omp parallel
    {
      std::vector<double> line_in(len_in), line_out(len_out);
      std::vector<std::size_t> hull;
      hull.reserve(len_in);
#pragma omp for schedule(static)
      for (std::ptrdiff_t l = 0; l < count; ++l) {
        const std::size_t o = static_cast<std::size_t>(l) / stride;
        const std::size_t s = static_cast<std::size_t>(l) % stride;
        const std::size_t in_base = o * len_in * stride + s;
        const std::size_t out_base = o * len_out * stride + s;
        for (std::size_t i = 0; i < len_in; ++i) {
          const double v = current[in_base + i * stride];
          line_in[i] = negate ? -v : v;
        }
        detail::conjugate_line_hull(y, line_in, u, line_out, hull);
        for (std::size_t j = 0; j < len_out; ++j) next[out_base + j * stride] = line_out[j];
      }
    }
    current = std::move(next);
    dims = out_dims;
  }
  std::copy(current.begin(), current.end(), out.begin());
}

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace parallel

}  // namespace illiq
