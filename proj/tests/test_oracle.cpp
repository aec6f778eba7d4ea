#include "hems/oracle.hpp"

#include <random>

#include "doctest.h"
#include "hems/errors.hpp"

using namespace hems;

namespace {

DayProfile make_day(std::vector<double> price, std::vector<double> background,
                    std::vector<double> renewable) {
  DayProfile d;
  d.date = Date{2021, 5, 1};
  d.price = std::move(price);
  d.background = std::move(background);
  d.renewable = std::move(renewable);
  return d;
}

DayProfile random_day(std::mt19937_64& rng, int horizon) {
  std::uniform_real_distribution<double> price(0.0, 0.5);
  std::uniform_real_distribution<double> load(0.0, 2.0);
  std::uniform_real_distribution<double> ren(0.0, 2.5);
  DayProfile d;
  d.date = Date{2021, 5, 1};
  for (int h = 0; h < horizon; ++h) {
    d.price.push_back(price(rng));
    d.background.push_back(load(rng));
    d.renewable.push_back(ren(rng));
  }
  return d;
}

// test-local exhaustive minimum, independent of the oracle module internals
double enumerate_min_cost(const DayProfile& day, const ApplianceSpec& spec) {
  const int horizon = day.hours();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << horizon); ++mask) {
    EnvState s = reset_episode(day, spec);
    double cost = 0.0;
    for (int h = 0; h < horizon; ++h) {
      const StepOutcome out = step(s, (mask >> h) & 1u, day, spec);
      cost += -out.reward;
      s = out.next_state;
    }
    best = std::min(best, cost);
  }
  return best;
}

}  // namespace

TEST_CASE("solve_day finds the cheapest schedule of the 4-hour toy day") {
  const DayProfile day = make_day({0.1, 0.4, 0.2, 0.3}, {0, 0, 0, 0}, {0, 0, 0, 0});
  const ApplianceSpec spec{1.0, 2};

  const double expected = enumerate_min_cost(day, spec);
  CHECK(expected == doctest::Approx(0.30));

  const OracleResult result = solve_day(day, spec);
  CHECK(result.optimal_cost == expected);
  CHECK(result.optimal_actions == std::vector<int>{1, 0, 1, 0});
  CHECK(result.value_table[4][0] == 0.0);
}

TEST_CASE("degenerate days cost nothing") {
  const ApplianceSpec spec{1.0, 2};
  SUBCASE("zero prices") {
    const auto r = solve_day(make_day({0, 0, 0, 0}, {1, 1, 1, 1}, {0, 0, 0, 0}), spec);
    CHECK(r.optimal_cost == 0.0);
  }
  SUBCASE("renewable covers everything at any schedule") {
    const auto r = solve_day(make_day({0.5, 0.5, 0.5, 0.5}, {1, 1, 1, 1}, {3, 3, 3, 3}), spec);
    CHECK(r.optimal_cost == 0.0);
  }
}

TEST_CASE("brute_force edge cases") {
  SUBCASE("one-hour day forces the single ON hour") {
    const DayProfile day = make_day({0.4}, {0.5}, {0.2});
    const auto r = brute_force(day, ApplianceSpec{1.0, 1});
    CHECK(r.optimal_actions == std::vector<int>{1});
    CHECK(r.optimal_cost == doctest::Approx(0.4 * (1.0 + 0.5 - 0.2)));
  }

  SUBCASE("required hours equal to the horizon leave one feasible schedule") {
    const DayProfile day = make_day({0.1, 0.2, 0.3}, {0, 0, 0}, {0, 0, 0});
    const auto r = brute_force(day, ApplianceSpec{1.0, 3});
    CHECK(r.optimal_actions == std::vector<int>{1, 1, 1});
    CHECK(r.optimal_cost == doctest::Approx(0.6));
  }

  SUBCASE("long horizons are rejected") {
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(brute_force(random_day(rng, 17), ApplianceSpec{}), ValidationError);
  }
}

TEST_CASE("dynamic programming agrees exactly with enumeration on random instances") {
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<int> horizon_dist(4, 12);
  std::uniform_int_distribution<int> required_dist(1, 3);
  for (int trial = 0; trial < 60; ++trial) {
    const int horizon = horizon_dist(rng);
    const ApplianceSpec spec{1.0, required_dist(rng)};
    const DayProfile day = random_day(rng, horizon);
    const OracleResult dp = solve_day(day, spec);
    const OracleResult bf = brute_force(day, spec);
    CHECK(dp.optimal_cost == bf.optimal_cost);
    CHECK(dp.optimal_actions == bf.optimal_actions);
  }
}

TEST_CASE("optimal actions replay to exactly the reported cost") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const DayProfile day = random_day(rng, 24);
    const ApplianceSpec spec{1.0, 2};
    const OracleResult r = solve_day(day, spec);

    EnvState s = reset_episode(day, spec);
    double cost = 0.0;
    for (int h = 0; h < 24; ++h) {
      const StepOutcome out = step(s, r.optimal_actions[h], day, spec);
      cost += -out.reward;
      s = out.next_state;
    }
    CHECK(cost == r.optimal_cost);
  }
}

TEST_CASE("raising a single price never lowers the optimal cost") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> hour(0, 23);
  for (int trial = 0; trial < 40; ++trial) {
    DayProfile day = random_day(rng, 24);
    const ApplianceSpec spec{1.0, 2};
    const double base = solve_day(day, spec).optimal_cost;
    day.price[hour(rng)] += 0.25;
    CHECK(solve_day(day, spec).optimal_cost >= base);
  }
}

TEST_CASE("the oracle lower-bounds random rollouts") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const DayProfile day = random_day(rng, 24);
    const ApplianceSpec spec{1.0, 2};
    const double optimum = solve_day(day, spec).optimal_cost;
    for (int k = 0; k < 20; ++k) {
      EnvState s = reset_episode(day, spec);
      double cost = 0.0;
      while (s.hour < 24) {
        const StepOutcome out = step(s, coin(rng), day, spec);
        cost += -out.reward;
        s = out.next_state;
      }
      CHECK(cost >= optimum - 1e-12);
    }
  }
}

TEST_CASE("value table marks infeasible states and decreases along the optimum") {
  const DayProfile day = make_day({0.1, 0.4, 0.2, 0.3}, {0, 0, 0, 0}, {0, 0, 0, 0});
  const ApplianceSpec spec{1.0, 2};
  const OracleResult r = solve_day(day, spec);
  REQUIRE(r.value_table.size() == 5);
  REQUIRE(r.value_table[0].size() == 3);
  CHECK(std::isinf(r.value_table[4][1]));  // remaining work after the day ends
  CHECK(std::isinf(r.value_table[3][2]));  // two hours owed, one hour left
  CHECK(r.value_table[0][2] == doctest::Approx(0.30));
}
