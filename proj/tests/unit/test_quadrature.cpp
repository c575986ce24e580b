#include <doctest.h>

#include <cmath>
#include <numbers>

#include "illiq/quadrature.hpp"

using namespace illiq;

TEST_CASE("trapezoid is exact on affine integrands") {
  CHECK(quad::trapezoid([](double u) { return 3.0 * u - 1.0; }, 0.0, 2.0, 1) == doctest::Approx(4.0));
  // signed orientation
  CHECK(quad::trapezoid([](double u) { return 3.0 * u - 1.0; }, 2.0, 0.0, 7) == doctest::Approx(-4.0));
}

TEST_CASE("trapezoid error is second order") {
  auto f = [](double u) { return std::exp(u); };
  const double exact = std::exp(1.0) - 1.0;
  const double e1 = std::abs(quad::trapezoid(f, 0.0, 1.0, 64) - exact);
  const double e2 = std::abs(quad::trapezoid(f, 0.0, 1.0, 128) - exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("romberg reaches the requested tolerance") {
  auto r = quad::romberg([](double u) { return std::sin(u); }, 0.0, std::numbers::pi, 1e-12, 1u << 20);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-11));

  // polynomial of degree 5 is integrated exactly after a few levels
  auto p = quad::romberg([](double u) { return u * u * u * u * u - u; }, -1.0, 2.0, 1e-12, 1u << 20);
  CHECK(p.value == doctest::Approx(64.0 / 6.0 - 1.0 / 6.0 - 1.5).epsilon(1e-12));
  CHECK(p.panels <= 64);
}

TEST_CASE("vector romberg integrates every component") {
  auto f = [](double u, std::span<double> out) {
    out[0] = std::sqrt(1.0 + u);
    out[1] = 1.0e6 * u * u;
    out[2] = 0.0;
  };
  auto r = quad::romberg(f, 3, 0.0, 3.0, 1e-10, 1u << 20);
  CHECK(r.converged);
  CHECK(r.value[0] == doctest::Approx(2.0 / 3.0 * (8.0 - 1.0)).epsilon(1e-9));
  CHECK(r.value[1] == doctest::Approx(9.0e6).epsilon(1e-12));
  CHECK(r.value[2] == 0.0);
}

TEST_CASE("romberg reports non-convergence at the panel cap") {
  auto r = quad::romberg([](double u) { return std::sin(1.0 / (u + 1e-4)); }, 0.0, 1.0, 1e-14, 64);
  CHECK_FALSE(r.converged);
  CHECK(r.panels <= 64);
}
