#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "beamlearn/regret_verify.hpp"

using namespace beamlearn;

namespace {

SyntheticBanditSpec small_spec() {
  SyntheticBanditSpec s;
  s.p_opt = {0.5, 0.3, 0.1};
  s.budget = 1;
  s.horizon = 400;
  return s;
}

}  // namespace

TEST_SUITE("regret_verify") {

TEST_CASE("ideal reward draws follow the optimality probabilities") {
  SyntheticBanditSpec certain;
  certain.p_opt = {1.0, 0.0, 0.0};
  certain.budget = 1;
  std::mt19937_64 rng(71);
  for (int i = 0; i < 100; ++i) CHECK(ideal_reward_draw(certain, rng) == std::optional<std::size_t>{0});

  const SyntheticBanditSpec spec = reference_synthetic_spec();
  const int n = 50000;
  std::vector<int> counts(spec.p_opt.size(), 0);
  int none = 0;
  for (int i = 0; i < n; ++i) {
    const auto w = ideal_reward_draw(spec, rng);
    if (w) {
      ++counts[*w];
    } else {
      ++none;
    }
  }
  for (std::size_t a = 0; a < spec.p_opt.size(); ++a) {
    const double p = spec.p_opt[a];
    CHECK(std::abs(counts[a] / double(n) - p) <= 4.0 * std::sqrt(p * (1.0 - p) / n) + 1e-12);
  }
  CHECK(none == 0);

  SyntheticBanditSpec partial;
  partial.p_opt = {0.5, 0.3};
  partial.budget = 1;
  int empty = 0;
  for (int i = 0; i < n; ++i) empty += ideal_reward_draw(partial, rng) ? 0 : 1;
  CHECK(std::abs(empty / double(n) - 0.2) <= 4.0 * std::sqrt(0.2 * 0.8 / n));
}

TEST_CASE("gap table") {
  const GapTable g = optimality_gaps(reference_synthetic_spec());
  CHECK(g.optimal == std::vector<std::size_t>{0, 1, 2});
  CHECK(g.suboptimal == std::vector<std::size_t>{3, 4, 5, 6, 7, 8, 9});
  CHECK(g.at(0, 0) == doctest::Approx(0.25));
  CHECK(g.at(0, 2) == doctest::Approx(0.05));
  CHECK(g.at(6, 1) == doctest::Approx(0.22));
}

TEST_CASE("greedy bound closed form") {
  const SyntheticBanditSpec s = small_spec();
  const double c = 1.0 + std::numbers::pi * std::numbers::pi / 3.0;
  // Gaps 0.2 and 0.4.
  CHECK(theorem1_bound(s, 1.0) == doctest::Approx(0.6 * c));
  CHECK(theorem1_bound(s, std::exp(1.0)) == doctest::Approx(8.0 * 7.5 + 0.6 * c));
  CHECK(theorem1_bound(s, std::exp(1.0)) == doctest::Approx(62.5739).epsilon(1e-5));
  for (double n : {3.0, 10.0, 77.0}) {
    const double base = theorem1_bound(s, 1.0);
    CHECK(theorem1_bound(s, n * n) - base == doctest::Approx(2.0 * (theorem1_bound(s, n) - base)));
  }
}

TEST_CASE("risk-aware bound closed form") {
  SyntheticBanditSpec s = small_spec();
  const double delta2 = std::pow((std::sqrt(5.0) - 1.0) / 2.0, 2);
  CHECK(delta2 == doctest::Approx(0.381966).epsilon(1e-6));
  const double c2 = 1.0 + std::numbers::pi * std::numbers::pi / 2.0;
  const double n = 500.0;
  // Always accepting leaves only the gap terms.
  CHECK(theorem2_bound(s, n) == doctest::Approx(8.0 * std::log(n) / delta2 * 7.5 + c2 * 0.6));

  s.acceptance = {0.7, 0.7, 0.7};
  const double z = 0.7;
  double second = 0.0;
  double third = 0.0;
  for (double d : {0.2, 0.4}) {
    second += (1.0 - z) * 0.5 * d / (z * d * d);
    third += z * d + (1.0 - z) * 0.5 * d;
  }
  const double c = 8.0 * std::log(n) / delta2;
  CHECK(theorem2_bound(s, n) == doctest::Approx(c * 7.5 + c * second + c2 * third));
  for (double m : {2.0, 100.0, 1e4}) CHECK(theorem2_bound(s, m) >= theorem1_bound(s, m));
}

TEST_CASE("zero gaps have no finite bound") {
  SyntheticBanditSpec s;
  s.p_opt = {0.4, 0.2, 0.2};
  s.budget = 2;
  CHECK_THROWS(theorem1_bound(s, 10.0));
  CHECK_THROWS(theorem2_bound(s, 10.0));
}

TEST_CASE("invalid synthetic specs are rejected") {
  SyntheticBanditSpec s = small_spec();
  s.p_opt = {0.7, 0.7};
  CHECK_THROWS(s.validate());
  s = small_spec();
  s.budget = 4;
  CHECK_THROWS(s.validate());
  s = small_spec();
  s.acceptance = {0.5};
  CHECK_THROWS(s.validate());
  s.acceptance = {0.0, 1.0, 1.0};
  CHECK_THROWS(s.validate());
}

TEST_CASE("regret is zero when every arm is optimal") {
  SyntheticBanditSpec s;
  s.p_opt = {0.3, 0.3};
  s.budget = 2;
  s.horizon = 100;
  const BoundTrace t = run_bound_check(s, SyntheticAlgorithm::greedy_ucb, 3, 1, 1);
  for (double r : t.mean_regret) CHECK(r == 0.0);
}

TEST_CASE("empirical regret is non-decreasing and below the bounds") {
  SyntheticBanditSpec s = small_spec();
  const BoundTrace greedy = run_bound_check(s, SyntheticAlgorithm::greedy_ucb, 8, 2, 1);
  REQUIRE(greedy.mean_regret.size() == s.horizon);
  for (std::size_t i = 1; i < greedy.mean_regret.size(); ++i) {
    CHECK(greedy.mean_regret[i] >= greedy.mean_regret[i - 1]);
    CHECK(greedy.mean_regret[i] <= greedy.bound_t1[i]);
  }
  CHECK(greedy.mean_regret.back() > 0.0);

  s.acceptance = {0.7, 0.7, 0.7};
  const BoundTrace risk = run_bound_check(s, SyntheticAlgorithm::risk_aware_fixed, 8, 2, 1);
  for (std::size_t i = 0; i < risk.mean_regret.size(); ++i) CHECK(risk.mean_regret[i] <= risk.bound_t2[i]);
}

TEST_CASE("bound checks are independent of the thread count") {
  const SyntheticBanditSpec s = small_spec();
  const BoundTrace a = run_bound_check(s, SyntheticAlgorithm::greedy_ucb, 6, 3, 1);
  const BoundTrace b = run_bound_check(s, SyntheticAlgorithm::greedy_ucb, 6, 3, 4);
  CHECK(a.mean_regret == b.mean_regret);
}

TEST_CASE("slope fit recovers a known line") {
  BoundTrace t;
  for (int n = 1; n <= 1000; ++n) {
    const double x = std::log10(static_cast<double>(n));
    t.mean_regret.push_back((2.0 + 0.5 * x) * std::log(static_cast<double>(n)));
  }
  const SlopeFit f = fit_regret_slope(t, 10, 1000);
  CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS(fit_regret_slope(t, 1, 100));
  CHECK_THROWS(fit_regret_slope(t, 10, 1001));
}

TEST_CASE("bound csv layout") {
  BoundTrace t;
  t.mean_regret = {0.5};
  t.bound_t1 = {2.0};
  t.bound_t2 = {3.0};
  std::ostringstream os;
  write_bound_csv(os, t);
  CHECK(os.str() == "n,mean_regret,bound_t1,bound_t2\n1,0.5,2,3\n");
}

}  // TEST_SUITE
