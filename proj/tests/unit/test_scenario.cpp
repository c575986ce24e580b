#include <doctest.h>

#include <cmath>
#include <limits>

#include "illiq/errors.hpp"
#include "illiq/scenario.hpp"

using namespace illiq;

TEST_CASE("probability vector validation") {
  CHECK_NOTHROW(ProbabilityVector({0.2, 0.3, 0.5}));
  CHECK_THROWS_AS(ProbabilityVector({0.2, 0.3, 0.4}), ProbabilityError);
  CHECK_THROWS_AS(ProbabilityVector({-0.1, 0.6, 0.5}), ProbabilityError);
  CHECK_THROWS_AS(ProbabilityVector(std::vector<double>{}), ProbabilityError);
  CHECK_THROWS_AS(ProbabilityVector({std::nan(""), 1.0}), ProbabilityError);
  // zero atoms are allowed
  CHECK_NOTHROW(ProbabilityVector({0.0, 1.0}));

  auto u = ProbabilityVector::uniform(1'000'000);
  CHECK(u.size() == 1'000'000);
  auto d = ProbabilityVector::dirac(4, 2);
  CHECK(d[2] == 1.0);
  CHECK(d[0] == 0.0);
}

TEST_CASE("scenario spaces have identity") {
  ScenarioSpace a({"w1", "w2"});
  ScenarioSpace b({"w1", "w2"});
  ScenarioSpace a2 = a;
  CHECK(a == a2);
  CHECK_FALSE(a == b);
  CHECK_THROWS_AS(ScenarioSpace({"w", "w"}), InvalidParams);
  CHECK_THROWS_AS(ScenarioSpace({"w1", "w2"}, ProbabilityVector({1.0})), ProbabilityError);

  ScenarioVector x(a, {1.0, 2.0});
  ScenarioVector y(b, {1.0, 2.0});
  CHECK_THROWS_AS(x + y, SpaceMismatch);
  CHECK_THROWS_AS(ScenarioVector(a, {1.0}), SpaceMismatch);
  CHECK_THROWS_AS(ScenarioVector(a, {1.0, std::numeric_limits<double>::infinity()}), NonFiniteInput);

  auto s = x + x;
  CHECK(s[1] == 4.0);
  auto t = 2.0 * x + 1.0;
  CHECK(t[0] == 3.0);
  CHECK(sup_norm(ScenarioVector(a, {-7.0, 3.0})) == 7.0);
}

TEST_CASE("expectation") {
  ProbabilityVector p({0.25, 0.75});
  std::vector<double> z{4.0, 8.0};
  CHECK(expectation(p, z) == doctest::Approx(7.0));
}

TEST_CASE("csv ingestion") {
  auto set = parse_scenarios_csv("scenario,prob,a,b\nw1,0.5,80,50\nw2,0.5,90,60\n");
  REQUIRE(set.space.has_probabilities());
  CHECK(set.asset_order == std::vector<std::string>{"a", "b"});
  CHECK(set.asset("b")[1] == 60.0);
  CHECK(set.space.labels()[0] == "w1");

  auto noprob = parse_scenarios_csv("scenario,x\ns1,1\ns2,2\ns3,3\n");
  CHECK_FALSE(noprob.space.has_probabilities());
  CHECK(noprob.asset("x").size() == 3);

  CHECK_THROWS_AS(parse_scenarios_csv("id,x\ns1,1\n"), ParseError);
  CHECK_THROWS_AS(parse_scenarios_csv("scenario,x\ns1,abc\n"), ParseError);
  CHECK_THROWS_AS(parse_scenarios_csv("scenario,x\ns1,1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_scenarios_csv("scenario,prob,x\ns1,0.4,1\ns2,0.4,2\n"), ProbabilityError);
  CHECK_THROWS_AS(parse_scenarios_csv("scenario,x\ns1,nan\n"), NonFiniteInput);
}

TEST_CASE("json ingestion") {
  auto set = parse_scenarios_json(R"({"labels":["a","b"],"probabilities":[0.1,0.9],"assets":{"x":[1,2]}})");
  CHECK(set.space.probabilities()->weights()[1] == doctest::Approx(0.9));
  CHECK(set.asset("x")[0] == 1.0);
  auto unlabeled = parse_scenarios_json(R"({"assets":{"x":[1,2,3]}})");
  CHECK(unlabeled.space.size() == 3);
  CHECK_THROWS_AS(parse_scenarios_json(R"({"assets":{"x":[1,2],"y":[1]}})"), ParseError);
  CHECK_THROWS_AS(parse_scenarios_json("{not json"), ParseError);
  CHECK_THROWS_AS(parse_scenarios_json(R"({"labels":["a"]})"), ParseError);
}

TEST_CASE("gbm sampling is reproducible and lognormal") {
  GbmParams g{100.0, 0.05, 0.2, 1.0};
  auto [s1, x1] = sample_gbm(g, 200'000, 42);
  auto [s2, x2] = sample_gbm(g, 200'000, 42);
  auto [s3, x3] = sample_gbm(g, 200'000, 43);
  CHECK(std::vector<double>(x1.values().begin(), x1.values().end()) ==
        std::vector<double>(x2.values().begin(), x2.values().end()));
  CHECK(x1[0] != x3[0]);

  double mean = 0.0;
  double sq = 0.0;
  for (double v : x1.values()) {
    mean += std::log(v);
    sq += std::log(v) * std::log(v);
  }
  const double n = static_cast<double>(x1.size());
  mean /= n;
  const double var = sq / n - mean * mean;
  // 5 standard errors
  CHECK(std::abs(mean - g.log_mean()) < 5.0 * g.log_stddev() / std::sqrt(n));
  CHECK(std::abs(std::sqrt(var) - g.log_stddev()) < 5.0 * g.log_stddev() / std::sqrt(2.0 * n));

  CHECK_THROWS_AS(GbmParams({-1.0, 0.0, 0.2, 1.0}).validate(), InvalidParams);
  CHECK_THROWS_AS(GbmParams({1.0, 0.0, 0.0, 1.0}).validate(), InvalidParams);
  CHECK_THROWS_AS(sample_gbm(g, 0, 1), InvalidParams);
}
