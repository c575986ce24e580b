#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "illiq/errors.hpp"
#include "illiq/measures.hpp"
#include "illiq/random.hpp"

using namespace illiq;

namespace {

struct Demo {
  ScenarioSpace space{{"w1", "w2", "w3"}, ProbabilityVector::uniform(3)};
  ScenarioVector x1{space, {80.0, 90.0, 100.0}};
  ScenarioVector x2{space, {50.0, 60.0, 40.0}};
  std::optional<ProbabilityVector> p = space.probabilities();
};

}  // namespace

TEST_CASE_FIXTURE(Demo, "linear worst-case demo") {
  LinearAdditive m{0.5};
  CHECK(beta(m, x1, WorstCase{}, p, 0.0) == -80.0);
  CHECK(beta(m, x1, WorstCase{}, p, 10.0) == doctest::Approx(-75.0));
  CHECK(beta_split(m, x1, WorstCase{}, p, 10.0) == doctest::Approx(-775.0));
  CHECK(beta_split(m, x1, WorstCase{}, p, 0.0) == 0.0);

  SupplyCurve c{70.0, 0.2};
  auto block = capital_requirement(10.0, -75.0, c, CapitalPolicy::block);
  auto split = capital_requirement(10.0, -775.0, c, CapitalPolicy::split);
  CHECK(block.capital_requirement == doctest::Approx(-30.0));
  CHECK(split.capital_requirement == doctest::Approx(-55.0));
  CHECK(split.capital_requirement_split_initial == doctest::Approx(-65.0));
  CHECK_THROWS_AS(beta(m, x1, WorstCase{}, p, -1.0), InvalidParams);
}

TEST_CASE_FIXTURE(Demo, "closed forms through the generic pipeline") {
  const double a = 0.3;
  const double var = rho(ValueAtRisk{0.4}, x1, p);
  for (double y : {0.5, 3.0, 17.0, 99.0}) {
    CHECK(beta(LinearAdditive{a}, x1, ValueAtRisk{0.4}, p, y) == doctest::Approx(var + a * y).epsilon(1e-12));
    CHECK(beta(ExponentialMultiplicative{a, 0.1}, x1, ValueAtRisk{0.4}, p, y) ==
          doctest::Approx(std::exp(-a * y * 0.1) * var).epsilon(1e-12));
    CHECK(beta_split(PowerLaw{2.0, 0.4}, x1, WorstCase{}, p, y) ==
          doctest::Approx(-80.0 * y + 2.0 * std::pow(y, 1.4) / 1.4).epsilon(1e-12));
  }
}

TEST_CASE_FIXTURE(Demo, "short side") {
  CHECK(delta_short(LinearAdditive{0.5}, x1, WorstCase{}, p, -10.0) == doctest::Approx(105.0));
  CHECK(delta_short(LinearAdditive{0.5}, x1, WorstCase{}, p, 0.0) == doctest::Approx(100.0));
  CHECK_THROWS_AS(delta_short(LinearAdditive{0.5}, x1, WorstCase{}, p, 1.0), InvalidParams);

  StochasticSlope sm{x1.with_values({0.1, 0.2, 0.3})};
  CHECK(short_side_supported(sm, WorstCase{}));
  CHECK_FALSE(short_side_supported(sm, AverageValueAtRisk{0.2}));
  CHECK_THROWS_AS(delta_short(sm, x1, Entropic{1.0}, p, -1.0), UnsupportedModelForShortSide);
  CHECK_FALSE(short_side_supported(ExponentialMultiplicative{0.1, 1.0}, Entropic{1.0}));
  CHECK(short_side_supported(ExponentialMultiplicative{0.1, 1.0}, AverageValueAtRisk{0.2}));
  CHECK(short_side_supported(PowerLaw{1.0, 0.5}, Entropic{1.0}));
}

TEST_CASE_FIXTURE(Demo, "two-asset portfolio") {
  std::vector<PortfolioAsset> assets{{"x1", LinearAdditive{0.5}, x1, {70.0, 0.2}},
                                     {"x2", LinearAdditive{1.0}, x2, {45.0, 0.1}}};
  const std::vector<double> y{10.0, 5.0};
  CHECK(beta_portfolio(assets, WorstCase{}, p, y) == -120.0);
  auto r = capital_portfolio(assets, WorstCase{}, p, y, CapitalPolicy::block);
  double sum = 0.0;
  for (const auto& leg : r.per_asset) sum += leg.beta_value;
  CHECK(sum == -110.0);
  CHECK(r.beta_value - sum == -10.0);
  CHECK(r.capital_requirement == doctest::Approx(10 * (-75 + 72) + 5 * (-35 + 45.5)));

  auto s = capital_portfolio(assets, WorstCase{}, p, y, CapitalPolicy::split);
  CHECK(s.capital_requirement <= r.capital_requirement);
  CHECK_THROWS_AS(beta_portfolio(assets, WorstCase{}, p, {10.0, 0.0}), InvalidParams);

  CHECK(capital_portfolio_return_based({10.0, 5.0}, {{70.0, 0.2}, {45.0, 0.1}}, -0.1) ==
        doctest::Approx(-(720.0 + 227.5) * 0.1));
}

TEST_CASE_FIXTURE(Demo, "portfolio axioms") {
  std::vector<PortfolioAsset> assets{{"x1", LinearAdditive{0.5}, x1, {}}, {"x2", LinearAdditive{1.0}, x2, {}}};
  AxiomSweep sweep;
  sweep.trials = 300;
  sweep.seed = 4;
  for (const auto& r : check_portfolio_axioms(
           [&](const std::vector<double>& y) { return beta_portfolio(assets, Entropic{0.5}, p, y); }, 2,
           MeasureProfile::beta, sweep)) {
    INFO(r.axiom);
    CHECK(r.passed());
  }
  // keep X~2 - u > 0 so the split exposure keeps growing
  sweep.hi = 30.0;
  for (const auto& r : check_portfolio_axioms(
           [&](const std::vector<double>& y) { return beta_portfolio_split(assets, Entropic{0.5}, p, y); }, 2,
           MeasureProfile::beta_split, sweep)) {
    INFO(r.axiom);
    CHECK(r.passed());
  }
}

TEST_CASE_FIXTURE(Demo, "measure axiom sweeps") {
  AxiomSweep sweep;
  sweep.trials = 500;
  sweep.seed = 1;
  for (const auto& r : check_measure_axioms([&](double y) { return beta(LinearAdditive{0.5}, x1, Entropic{0.2}, p, y); },
                                            MeasureProfile::beta, sweep)) {
    INFO(r.axiom);
    CHECK(r.passed());
  }
  for (const auto& r :
       check_measure_axioms([&](double y) { return beta_split(PowerLaw{1.0, 0.5}, x1, WorstCase{}, p, y); },
                            MeasureProfile::beta_split, sweep)) {
    INFO(r.axiom);
    CHECK(r.passed());
  }
  AxiomSweep shorts = sweep;
  shorts.lo = -100.0;
  shorts.hi = 0.0;
  for (const auto& r :
       check_measure_axioms([&](double y) { return delta_short(SignLinear{2.0, 0.1}, x1, AverageValueAtRisk{0.5}, p, y); },
                            MeasureProfile::delta_short, shorts)) {
    INFO(r.axiom);
    CHECK(r.passed());
  }
  // rho(X~) < 0 makes e^{-ay} rho(X~) concave: the convexity sweep must catch it
  auto exp_reports = check_measure_axioms(
      [&](double y) { return beta(ExponentialMultiplicative{0.01, 1.0}, x1, WorstCase{}, p, y); },
      MeasureProfile::beta, sweep);
  bool caught = false;
  for (const auto& r : exp_reports) {
    if (r.axiom.find("convex") != std::string::npos) caught = r.violation_count > 0;
  }
  CHECK(caught);
}

TEST_CASE_FIXTURE(Demo, "entropic split dominance needs enough impact") {
  SupplyCurve c{70.0, 0.2};
  auto gap = [&](double a, double lambda, double y) {
    const double b = beta(LinearAdditive{a}, x1, Entropic{lambda}, p, y);
    const double bs = beta_split(LinearAdditive{a}, x1, Entropic{lambda}, p, y);
    return capital_requirement(y, bs, c, CapitalPolicy::split).capital_requirement -
           capital_requirement(y, b, c, CapitalPolicy::block).capital_requirement;
  };
  // rho(y X~) - y rho(X~) grows like (y-1) ln(3)/lambda and beats a y^2/2 when lambda is small
  CHECK(gap(0.5, 0.1, 10.0) > 0.0);
  for (double y = 0.5; y <= 100.0; y += 0.5) CHECK(gap(0.5, 2.0, y) <= 1e-9);
}

TEST_CASE("gbm log-price portfolio VaR against correlated Monte Carlo") {
  std::vector<GbmParams> g{{100.0, 0.05, 0.2, 1.0}, {50.0, 0.03, 0.3, 1.0}};
  const std::vector<std::vector<double>> corr{{1.0, 0.4}, {0.4, 1.0}};
  const std::vector<double> a{0.001, 0.002};
  const std::vector<double> y{10.0, 5.0};
  const double delta = 0.05;
  const double closed = var_gbm_portfolio(g, a, corr, y, delta);

  Eigen::Matrix2d r;
  r << 1.0, 0.4, 0.4, 1.0;
  const Eigen::Matrix2d l = r.llt().matrixL();
  const std::size_t n = 400'000;
  std::vector<double> sums(n);
  rng::CounterStream s(rng::derive_seed(31, 1));
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::Vector2d w(s.normal(), s.normal());
    const Eigen::Vector2d c = l * w;
    double total = 0.0;
    for (int i = 0; i < 2; ++i) {
      total += g[i].log_mean() + g[i].log_stddev() * c(i) - a[i] * y[i] * g[i].horizon;
    }
    sums[k] = total;
  }
  std::sort(sums.begin(), sums.end());
  const double mc = -sums[static_cast<std::size_t>(delta * n)];
  CHECK(closed == doctest::Approx(mc).epsilon(0.01));

  CHECK_THROWS_AS(var_gbm_portfolio(g, a, {{1.0, 2.0}, {2.0, 1.0}}, y, delta), NonPSDCovariance);
  CHECK_THROWS_AS(var_gbm_portfolio(g, a, {{1.0, 0.3}, {0.2, 1.0}}, y, delta), NonPSDCovariance);
  CHECK_THROWS_AS(var_gbm_portfolio({g[0], {50.0, 0.03, 0.3, 2.0}}, a, corr, y, delta), InvalidParams);
}
