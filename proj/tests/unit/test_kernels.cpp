#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "illiq/kernels.hpp"
#include "illiq/random.hpp"

using namespace illiq;

namespace {

std::vector<double> axis(double lo, double hi, std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return a;
}

}  // namespace

TEST_CASE("counter rng is order independent") {
  rng::CounterStream s(99);
  const double first = s.uniform();
  const double second = s.uniform();
  CHECK(first == rng::uniform_open(99, 0));
  CHECK(second == rng::uniform_open(99, 1));
  CHECK(rng::derive_seed(1, 2) != rng::derive_seed(1, 3));
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const double u = rng::uniform_open(5, k);
    CHECK((u > 0.0 && u < 1.0));
  }
  CHECK(rng::normal_quantile(0.5) == doctest::Approx(0.0));
  CHECK(rng::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(rng::normal_cdf(rng::normal_quantile(0.05)) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("parallel normals match serial bit for bit") {
  std::vector<double> a(10007);
  std::vector<double> b(10007);
  serial::standard_normals(17, 1000, a);
  parallel::standard_normals(17, 1000, b);
  CHECK(a == b);
  CHECK(a[0] == rng::standard_normal(17, 1000));
}

TEST_CASE("hull conjugate of a line matches brute force") {
  const auto y = axis(-3.0, 3.0, 61);
  const auto u = axis(-10.0, 10.0, 101);
  std::vector<double> f(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) f[i] = std::abs(y[i]) + 0.3 * y[i] * y[i] * std::sin(y[i]);
  std::vector<double> ref(u.size());
  std::vector<double> fast(u.size());
  serial::conjugate({y}, f, {u}, ref);
  parallel::conjugate({y}, f, {u}, fast);
  for (std::size_t j = 0; j < u.size(); ++j) CHECK(fast[j] == doctest::Approx(ref[j]).epsilon(1e-12));
}

TEST_CASE("separable conjugate matches brute force in 2 and 3 dimensions") {
  const auto y0 = axis(-2.0, 2.0, 17);
  const auto y1 = axis(-1.0, 3.0, 13);
  const auto y2 = axis(0.0, 1.0, 7);
  const auto u0 = axis(-5.0, 5.0, 21);
  const auto u1 = axis(-4.0, 6.0, 19);
  const auto u2 = axis(-3.0, 3.0, 9);

  std::vector<double> f2(y0.size() * y1.size());
  for (std::size_t i = 0; i < y0.size(); ++i) {
    for (std::size_t j = 0; j < y1.size(); ++j) {
      f2[i * y1.size() + j] = y0[i] * y0[i] + std::abs(y1[j] - 0.5) + 0.2 * y0[i] * y1[j] + std::cos(3.0 * y0[i]);
    }
  }
  std::vector<double> r2(u0.size() * u1.size());
  std::vector<double> p2(r2.size());
  serial::conjugate({y0, y1}, f2, {u0, u1}, r2);
  parallel::conjugate({y0, y1}, f2, {u0, u1}, p2);
  for (std::size_t k = 0; k < r2.size(); ++k) CHECK(p2[k] == doctest::Approx(r2[k]).epsilon(1e-12));

  std::vector<double> f3(y0.size() * y1.size() * y2.size());
  for (std::size_t i = 0; i < y0.size(); ++i) {
    for (std::size_t j = 0; j < y1.size(); ++j) {
      for (std::size_t k = 0; k < y2.size(); ++k) {
        f3[(i * y1.size() + j) * y2.size() + k] = std::exp(0.3 * y0[i]) + y1[j] * y2[k] - std::sin(y2[k] * y0[i]);
      }
    }
  }
  std::vector<double> r3(u0.size() * u1.size() * u2.size());
  std::vector<double> p3(r3.size());
  serial::conjugate({y0, y1, y2}, f3, {u0, u1, u2}, r3);
  parallel::conjugate({y0, y1, y2}, f3, {u0, u1, u2}, p3);
  for (std::size_t k = 0; k < r3.size(); ++k) CHECK(p3[k] == doctest::Approx(r3[k]).epsilon(1e-12));
}

TEST_CASE("conjugate skips +inf entries") {
  const auto y = axis(0.0, 4.0, 5);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> f{inf, 1.0, 0.0, 1.0, inf};
  const std::vector<double> u{-1.0, 0.0, 1.0};
  std::vector<double> ref(3);
  std::vector<double> fast(3);
  serial::conjugate({y}, f, {u}, ref);
  parallel::conjugate({y}, f, {u}, fast);
  CHECK(ref == std::vector<double>{-2.0, 0.0, 2.0});
  CHECK(fast == ref);
}

TEST_CASE("thread count does not change results") {
  const auto y = axis(-1.0, 1.0, 33);
  const auto u = axis(-2.0, 2.0, 33);
  std::vector<double> f(y.size() * y.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(static_cast<double>(i));
  std::vector<double> one(f.size());
  std::vector<double> many(f.size());
  parallel::set_thread_count(1);
  parallel::conjugate({y, y}, f, {u, u}, one);
  parallel::set_thread_count(4);
  parallel::conjugate({y, y}, f, {u, u}, many);
  parallel::set_thread_count(0);
  CHECK(one == many);
}

TEST_CASE("for_each_index rethrows the lowest failing index") {
  std::vector<int> hit(100, 0);
  parallel::for_each_index(hit.size(), [&](std::size_t i) { hit[i] = 1; });
  CHECK(std::count(hit.begin(), hit.end(), 1) == 100);
  try {
    parallel::for_each_index(100, [](std::size_t i) {
      if (i == 37 || i == 80) throw std::runtime_error(std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "37");
  }
}
