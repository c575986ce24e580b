#pragma once

// Data-parallel inner loops. Every kernel has a single-threaded reference in
// `illiq::serial` that the tests compare against; the `illiq::parallel`
// versions are the ones the library calls. Parallel kernels never share
// mutable state between iterations and reduce in a fixed order, so their
// output does not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <vector>

namespace illiq {

/// Row-major tensor grid: axis 0 varies slowest.
struct TensorShape {
  std::vector<std::size_t> dims;

  std::size_t size() const;
  std::size_t stride(std::size_t axis) const;
};

namespace serial {

/// out[k] = standard normal draw number first_counter + k of stream `seed`.
void standard_normals(std::uint64_t seed, std::uint64_t first_counter, std::span<double> out);

/// Discrete Legendre transform by exhaustive search:
///   out(u) = max_{y in grid} ( <u, y> - f(y) )
/// over a tensor grid. Entries of `f` equal to +infinity are excluded.
/// O(|grid| * |u-grid|); kept as the oracle for the separable kernel.
void conjugate(const std::vector<std::vector<double>>& y_axes, std::span<const double> f,
               const std::vector<std::vector<double>>& u_axes, std::span<double> out);

}  // namespace serial

namespace parallel {

void standard_normals(std::uint64_t seed, std::uint64_t first_counter, std::span<double> out);

/// Same contract as serial::conjugate, computed axis by axis: each pass is a
/// 1-D transform along one axis done through the lower convex hull of every
/// grid line, lines distributed over threads.
void conjugate(const std::vector<std::vector<double>>& y_axes, std::span<const double> f,
               const std::vector<std::vector<double>>& u_axes, std::span<double> out);

/// Calls fn(i) for i in [0, n) across threads. The exception thrown for the
/// lowest index is rethrown on the calling thread.
template <class F>
void for_each_index(std::size_t n, F&& fn) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  std::exception_ptr error;
  std::ptrdiff_t error_index = count;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(illiq_for_each_index)
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

void set_thread_count(int threads);
int thread_count();

}  // namespace parallel

namespace detail {

/// 1-D transform of a single line through its lower convex hull.
/// `y` strictly increasing, `u` strictly increasing. `f` entries equal to
/// +infinity are skipped; if every entry is skipped the output is -infinity.
void conjugate_line_hull(std::span<const double> y, std::span<const double> f, std::span<const double> u,
                         std::span<double> out, std::vector<std::size_t>& hull_scratch);

}  // namespace detail

}  // namespace illiq
