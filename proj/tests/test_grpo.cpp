#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rlvrseg/grpo.hpp"
#include "rlvrseg/sim.hpp"

using namespace rlvrseg;

TEST_CASE("advantage examples") {
  CHECK(advantages({{0, 2}}) == std::vector<double>{-1, 1});
  CHECK(advantages({{5, 5, 5, 5}}) == std::vector<double>{0, 0, 0, 0});

  auto adv = advantages({{1, 2, 3}});
  CHECK(adv[0] == doctest::Approx(-std::sqrt(1.5)));
  CHECK(adv[1] == doctest::Approx(0.0));
  CHECK(adv[2] == doctest::Approx(std::sqrt(1.5)));

  CHECK_THROWS_AS(advantages({{1.0}}), GroupTooSmall);
}

TEST_CASE("advantage normalization laws") {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    int n = rng.uniform_int(2, 64);
    RolloutGroup g;
    for (int i = 0; i < n; ++i) g.rewards.push_back(rng.uniform() * 10);
    if (is_degenerate_group(g.rewards)) continue;

    auto adv = advantages(g);
    double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
    double ss = 0;
    for (double a : adv) ss += (a - mean) * (a - mean);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(ss / n) - 1.0) < 1e-9);

    // shift and positive-scale invariance
    RolloutGroup shifted, scaled;
    for (double r : g.rewards) {
      shifted.rewards.push_back(r + 123.25);
      scaled.rewards.push_back(r * 7.5);
    }
    auto adv_s = advantages(shifted);
    auto adv_k = advantages(scaled);
    for (int i = 0; i < n; ++i) {
      CHECK(adv_s[std::size_t(i)] ==
            doctest::Approx(adv[std::size_t(i)]).epsilon(1e-9));
      CHECK(adv_k[std::size_t(i)] ==
            doctest::Approx(adv[std::size_t(i)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("sample-std mode") {
  GrpoConfig cfg;
  cfg.std_mode = StdMode::kSample;
  auto adv = advantages({{0, 2}}, cfg);
  CHECK(adv[0] == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(adv[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("grpo objective") {
  RolloutGroup g;
  g.rewards = {0, 0, 0};
  g.ratios = std::vector<double>{1.0, 2.0, 0.5};
  std::vector<double> adv = {2.0, 1.0, -1.0};
  ObjectiveResult res = grpo_objective(g, adv);
  CHECK(res.terms[0] == doctest::Approx(2.0));
  CHECK(res.terms[1] == doctest::Approx(1.2));
  CHECK(res.terms[2] == doctest::Approx(-0.8));
  CHECK(res.mean == doctest::Approx((2.0 + 1.2 - 0.8) / 3.0));

  RolloutGroup no_ratios;
  no_ratios.rewards = {0, 1};
  CHECK_THROWS_AS(grpo_objective(no_ratios, {0, 1}), RatiosRequired);
}

TEST_CASE("objective with identity ratios returns advantages") {
  Rng rng(9);
  RolloutGroup g;
  for (int i = 0; i < 16; ++i) g.rewards.push_back(rng.uniform());
  g.ratios = std::vector<double>(16, 1.0);
  auto adv = advantages(g);
  auto res = grpo_objective(g, adv);
  for (std::size_t i = 0; i < adv.size(); ++i)
    CHECK(res.terms[i] == adv[i]);
}

TEST_CASE("kl penalty subtracts when beta > 0") {
  RolloutGroup g;
  g.rewards = {0, 1};
  g.ratios = std::vector<double>{1.0, 1.0};
  g.kl_terms = std::vector<double>{0.5, 0.25};
  GrpoConfig cfg;
  cfg.kl_beta = 2.0;
  auto res = grpo_objective(g, {1.0, -1.0}, cfg);
  CHECK(res.terms[0] == doctest::Approx(1.0 - 1.0));
  CHECK(res.terms[1] == doctest::Approx(-1.0 - 0.5));
}

TEST_CASE("rest_select examples") {
  CHECK(rest_select({0.9, -0.5, 0.1, 0.2}, {4, 2}) ==
        std::vector<int>{0, 1});
  CHECK(rest_select(std::vector<double>(8, 1.0), {8, 4}) ==
        std::vector<int>{0, 1, 6, 7});
  std::vector<double> adv = {3, 1, 2, 0};
  CHECK(rest_select(adv, {4, 4}) == std::vector<int>{0, 1, 2, 3});
  CHECK_THROWS_AS(rest_select({1.0, 2.0}, {2, 4}), PoolTooSmall);
  CHECK_THROWS_AS(rest_select({1.0, 2.0, 3.0}, {3, 3}), Error);
}

TEST_CASE("rest_select contains extrema and matches sort oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    int n = rng.uniform_int(2, 512);
    int m = 2 * rng.uniform_int(1, std::min(32, n / 2));
    std::vector<double> adv;
    for (int i = 0; i < n; ++i)
      adv.push_back(double(rng.uniform_int(-5, 5)));  // force ties

    std::vector<int> sel = rest_select(adv, {n, m});
    CHECK(int(sel.size()) == m);
    CHECK(std::is_sorted(sel.begin(), sel.end()));
    CHECK(std::adjacent_find(sel.begin(), sel.end()) == sel.end());

    double lo = *std::min_element(adv.begin(), adv.end());
    double hi = *std::max_element(adv.begin(), adv.end());
    bool has_min = false, has_max = false;
    for (int i : sel) {
      if (adv[std::size_t(i)] == lo) has_min = true;
      if (adv[std::size_t(i)] == hi) has_max = true;
    }
    CHECK(has_min);
    CHECK(has_max);

    // independent oracle: explicit (advantage, index) sort
    std::vector<std::pair<double, int>> keyed;
    for (int i = 0; i < n; ++i) keyed.emplace_back(adv[std::size_t(i)], i);
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> expected;
    for (int i = 0; i < m / 2; ++i) expected.push_back(keyed[std::size_t(i)].second);
    for (int i = n - m / 2; i < n; ++i)
      expected.push_back(keyed[std::size_t(i)].second);
    std::sort(expected.begin(), expected.end());
    CHECK(sel == expected);
  }
}
