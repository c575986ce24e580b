#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "illiq/duality.hpp"
#include "illiq/errors.hpp"

using namespace illiq;

namespace {

GridFunction sample(const std::vector<double>& y, double (*fn)(double)) {
  std::vector<double> v;
  for (double t : y) v.push_back(fn(t));
  return GridFunction::line(y, v);
}

struct Demo {
  ScenarioSpace space{{"a", "b", "c", "d", "e"}, ProbabilityVector({0.1, 0.2, 0.3, 0.25, 0.15})};
  ScenarioVector x{space, {95.0, 102.0, 88.0, 110.0, 99.0}};
  std::optional<ProbabilityVector> p = space.probabilities();
};

}  // namespace

TEST_CASE("affine biconjugate is exact") {
  auto f = sample(linspace(-100, 100, 401), [](double y) { return 0.5 * y - 80.0; });
  auto pair = biconjugate_check(f);
  CHECK(pair.f_convex);
  CHECK(pair.max_recovery_error <= 1e-9);
  std::size_t finite = 0;
  for (std::size_t j = 0; j < pair.f_star.size(); ++j) {
    if (is_sentinel(pair.f_star.values[j])) continue;
    ++finite;
    CHECK(pair.f_star.axes[0][j] == doctest::Approx(0.5));
    CHECK(pair.f_star.values[j] == doctest::Approx(80.0));
  }
  CHECK(finite == 1);
}

TEST_CASE("quadratic biconjugate error halves with the grid step") {
  double prev_bound = 0.0;
  for (std::size_t n : {1025u, 2049u, 4097u}) {
    auto f = sample(linspace(-10, 10, n), [](double y) { return 0.25 * y * y - 3.0 * y; });
    auto pair = biconjugate_check(f);
    CHECK(pair.f_convex);
    CHECK(pair.max_recovery_error <= pair.grid_bound);
    if (prev_bound > 0.0) {
      CHECK(pair.grid_bound == doctest::Approx(prev_bound / 2.0).epsilon(0.01));
    }
    prev_bound = pair.grid_bound;
  }
}

TEST_CASE("conjugate of a concave function is its chord") {
  auto f = sample(linspace(-1, 1, 101), [](double y) { return -y * y; });
  auto pair = biconjugate_check(f);
  CHECK_FALSE(pair.f_convex);
  CHECK(pair.f_star_star.values[50] == doctest::Approx(-1.0));
  CHECK(pair.max_recovery_error == doctest::Approx(1.0));
}

TEST_CASE("2-d conjugate of a separable quadratic") {
  const auto a = linspace(-4, 4, 81);
  GridFunction f{{a, a}, {}};
  for (double s : a) {
    for (double t : a) f.values.push_back(s * s + 0.5 * t * t);
  }
  auto fs = conjugate_on(f, {linspace(-2, 2, 11), linspace(-2, 2, 11)});
  // f*(u,v) = u^2/4 + v^2/2 when the maximiser sits on the grid
  CHECK(fs.values[0] == doctest::Approx(1.0 + 2.0));
  CHECK(fs.values[5 * 11 + 5] == doctest::Approx(0.0));
  auto pair = biconjugate_check(f, {4096, 64});
  CHECK(pair.max_recovery_error <= pair.grid_bound);
}

TEST_CASE("grid function interpolation") {
  auto f = GridFunction::line({0.0, 1.0, 3.0}, {0.0, 2.0, 0.0});
  CHECK(f.interpolate(0.5) == doctest::Approx(1.0));
  CHECK(f.interpolate(2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(f.interpolate(3.5), OutOfGridSpan);
  CHECK_THROWS_AS(GridFunction::line({0.0}, {1.0}).validate(), EmptyGrid);
  CHECK_THROWS_AS(GridFunction::line({0.0, 0.0}, {1.0, 1.0}).validate(), InvalidParams);
  CHECK(midpoint_convex(GridFunction::line({0, 1, 2}, {1, 0, 1})));
  CHECK_FALSE(midpoint_convex(GridFunction::line({0, 1, 2}, {0, 1, 0})));
}

TEST_CASE("beta hat lift") {
  auto f = sample(linspace(-100, 100, 201), [](double y) { return 0.5 * y - 80.0; });
  CHECK(beta_hat(f, 5.0, 2.0) == doctest::Approx(-76.5));
  CHECK(beta_hat(f, 7.0, 0.0) == doctest::Approx(f.interpolate(7.0)));
  for (double m : {-3.0, 1.0, 12.0}) {
    CHECK(beta_hat(f, 5.0 + m, 2.0 + m) - beta_hat(f, 5.0, 2.0) == doctest::Approx(m).epsilon(1e-12));
    CHECK(beta_hat(f, 5.0 + m, 2.0 + m, Side::short_side) - beta_hat(f, 5.0, 2.0, Side::short_side) ==
          doctest::Approx(-m).epsilon(1e-12));
  }
  const auto a = linspace(-10, 10, 21);
  GridFunction g{{a, a}, std::vector<double>(a.size() * a.size(), 1.0)};
  const std::vector<double> h{1.0, 2.0};
  const std::vector<double> x{0.5, -0.5};
  const std::vector<double> h2{4.0, 5.0};
  const std::vector<double> x2{3.5, 2.5};
  CHECK(beta_hat(g, h2, x2) - beta_hat(g, h, x) == doctest::Approx(3.0));
}

TEST_CASE("lipschitz bound") {
  auto f = sample(linspace(-100, 100, 401), [](double y) { return 0.5 * y - 80.0; });
  auto r = lipschitz_check(f, 10'000, 1);
  CHECK(r.pass);
  CHECK(r.max_ratio <= std::sqrt(2.0) + 1e-9);

  // gradient (s, 1 - s) has norm sqrt(2) exactly for s = (1 + sqrt 3)/2
  auto tight = sample(linspace(-100, 100, 401), [](double y) { return 0.5 * (1.0 + std::sqrt(3.0)) * y; });
  auto t = lipschitz_check(tight, 10'000, 2);
  CHECK(t.pass);
  CHECK(t.max_ratio >= 0.99 * std::sqrt(2.0));

  auto steep = sample(linspace(-100, 100, 401), [](double y) { return -3.0 * y; });
  CHECK_FALSE(lipschitz_check(steep, 1000, 3).pass);
}

TEST_CASE_FIXTURE(Demo, "penalty functions") {
  const std::vector<double> q{0.2, 0.2, 0.2, 0.2, 0.2};
  CHECK(penalty_alpha(WorstCase{}, p, q).alpha == 0.0);
  // q/p = 2 on scenario a: inside the AVaR_{0.5} set, outside AVaR_{0.9}
  CHECK(penalty_alpha(AverageValueAtRisk{0.5}, p, q).alpha == 0.0);
  CHECK(std::isinf(penalty_alpha(AverageValueAtRisk{0.9}, p, q).alpha));
  double kl = 0.0;
  for (std::size_t i = 0; i < 5; ++i) kl += q[i] * std::log(q[i] / (*p)[i]);
  CHECK(penalty_alpha(Entropic{2.0}, p, q).alpha == doctest::Approx(kl / 2.0));
  auto v = penalty_alpha(ValueAtRisk{0.1}, p, q);
  CHECK(v.lower_bound);
  CHECK(v.alpha >= 0.0);

  ProbabilityVector with_zero({0.0, 0.25, 0.25, 0.25, 0.25});
  CHECK_THROWS_AS(penalty_alpha(Entropic{1.0}, with_zero, q), AbsoluteContinuityViolation);
}

TEST_CASE_FIXTURE(Demo, "dual representation of beta") {
  for (const RiskFunctional& f : std::vector<RiskFunctional>{WorstCase{}, Entropic{0.3}, AverageValueAtRisk{0.35}}) {
    for (double y : {0.0, 5.0, 40.0}) {
      const auto z = offsetting_exposure(LinearAdditive{0.4}, x, y).z;
      auto r = dual_check(f, p, z.values(), 1000, 8);
      INFO(functional_name(f), " y=", y);
      CHECK(r.pass);
      CHECK(r.gap <= 1e-9);
      CHECK(r.random_above_primal == 0);
      CHECK(r.beta_value == doctest::Approx(rho(f, z, p)));
    }
  }
  CHECK_THROWS_AS(dual_check(ValueAtRisk{0.2}, p, x.values(), 10, 1), InvalidParams);
  auto soft = dual_maximizer(Entropic{0.1}, p, x.values());
  double norm = 0.0;
  for (std::size_t i = 0; i < 5; ++i) norm += (*p)[i] * std::exp(-0.1 * x[i]);
  CHECK(soft[2] == doctest::Approx((*p)[2] * std::exp(-0.1 * 88.0) / norm));
}

TEST_CASE_FIXTURE(Demo, "build_f samples beta") {
  FConfig c{LinearAdditive{0.4}, x, Entropic{0.3}, p, FKind::block, {}};
  auto f = build_f(c, linspace(-20, 20, 41));
  CHECK(f.interpolate(10.0) == doctest::Approx(beta(LinearAdditive{0.4}, x, Entropic{0.3}, p, 10.0)));
  CHECK_THROWS_AS(build_f(c, {1.0, 2.0}), InvalidParams);

  FConfig s = c;
  s.kind = FKind::split;
  auto fs = build_f(s, linspace(-20, 20, 41));
  CHECK(fs.interpolate(10.0) == doctest::Approx(beta_split(LinearAdditive{0.4}, x, Entropic{0.3}, p, 10.0)));
  CHECK(fs.interpolate(0.0) == 0.0);

  std::vector<PortfolioAsset> assets{{"a", LinearAdditive{0.4}, x, {}}, {"b", LinearAdditive{1.0}, x, {}}};
  auto g = build_f_portfolio(assets, WorstCase{}, p, FKind::block, {linspace(-5, 5, 11), linspace(-5, 5, 11)});
  const std::vector<double> pt{3.0, 2.0};
  CHECK(g.interpolate(pt) == doctest::Approx(beta_portfolio(assets, WorstCase{}, p, pt)));
  CHECK(lipschitz_check(g, 2000, 4).pass);
}
