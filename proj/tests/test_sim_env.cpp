#include "hems/sim_env.hpp"

#include <random>

#include "doctest.h"
#include "hems/errors.hpp"

using namespace hems;

namespace {

DayProfile flat_day(int hours = 24, double price = 0.1, double background = 0.5,
                    double renewable = 0.0) {
  DayProfile d;
  d.date = Date{2021, 5, 1};
  d.price.assign(hours, price);
  d.background.assign(hours, background);
  d.renewable.assign(hours, renewable);
  return d;
}

}  // namespace

TEST_CASE("reset starts the day with the full requirement and hour-0 observations") {
  DayProfile day = flat_day();
  day.price[0] = 0.42;
  day.renewable[0] = 0.2;
  day.background[0] = 0.9;
  ApplianceSpec spec;

  const EnvState s = reset(day, spec);
  CHECK(s.hour == 0);
  CHECK(s.remaining_task == 2);
  CHECK(s.price_obs == 0.42);
  CHECK(s.renewable_obs == 0.2);
  CHECK(s.background_obs == 0.9);

  CHECK(reset(day, spec) == s);  // deterministic
}

TEST_CASE("reset rejects malformed profiles") {
  ApplianceSpec spec;
  CHECK_THROWS_AS(reset(flat_day(23), spec), ValidationError);

  DayProfile bad = flat_day();
  bad.background[5] = -0.1;
  CHECK_THROWS_AS(reset(bad, spec), ValidationError);

  DayProfile ragged = flat_day();
  ragged.renewable.pop_back();
  CHECK_THROWS_AS(reset(ragged, spec), ValidationError);

  CHECK_THROWS_AS(reset(flat_day(), ApplianceSpec{0.0, 2}), ValidationError);
  CHECK_THROWS_AS(reset(flat_day(), ApplianceSpec{1.0, 0}), ValidationError);
  CHECK_THROWS_AS(reset(flat_day(), ApplianceSpec{1.0, 25}), ValidationError);
}

TEST_CASE("force_action fires exactly when no slack is left") {
  EnvState s;
  s.hour = 22;
  s.remaining_task = 2;
  CHECK(force_action(s, 0) == 1);

  s.hour = 23;
  s.remaining_task = 1;
  CHECK(force_action(s, 0) == 1);

  s.hour = 10;
  s.remaining_task = 2;
  CHECK(force_action(s, 0) == 0);
  CHECK(force_action(s, 1) == 1);

  s.hour = 24;
  CHECK_THROWS_AS(force_action(s, 0), ValidationError);

  s.hour = 3;
  CHECK_THROWS_AS(force_action(s, 2), ValidationError);
}

TEST_CASE("hourly_reward bills the net load and clamps at zero") {
  CHECK(hourly_reward(0.10, 1.0, 0.5, 0.2) == doctest::Approx(-0.13));
  CHECK(hourly_reward(0.10, 0.0, 0.3, 1.0) == 0.0);
  CHECK(hourly_reward(0.0, 1.0, 1.0, 0.0) == 0.0);
  // clamped result is plain zero, not negative zero
  CHECK(!std::signbit(hourly_reward(0.10, 0.0, 0.3, 1.0)));
  CHECK_THROWS_AS(hourly_reward(-0.1, 0, 0, 0), ValidationError);
  CHECK_THROWS_AS(hourly_reward(0.1, -1, 0, 0), ValidationError);
}

TEST_CASE("step advances the hour and decrements the task only when power flows") {
  DayProfile day = flat_day();
  ApplianceSpec spec;
  EnvState s = reset(day, spec);
  for (int h = 0; h < 5; ++h) s = step(s, 0, day, spec).next_state;
  REQUIRE(s.hour == 5);
  REQUIRE(s.remaining_task == 2);

  SUBCASE("running decrements") {
    const StepOutcome out = step(s, 1, day, spec);
    CHECK(out.next_state.hour == 6);
    CHECK(out.next_state.remaining_task == 1);
    CHECK(out.effective_action == 1);
    CHECK(out.reward == doctest::Approx(-0.1 * 1.5));
  }

  SUBCASE("a finished task makes action 1 a no-op") {
    s.remaining_task = 0;
    const StepOutcome out = step(s, 1, day, spec);
    CHECK(out.next_state.remaining_task == 0);
    CHECK(out.effective_action == 0);
    CHECK(out.reward == doctest::Approx(-0.1 * 0.5));  // background only
  }
}

TEST_CASE("an all-zeros day is forced to run exactly in the final two hours") {
  DayProfile day = flat_day();
  ApplianceSpec spec;
  EnvState s = reset(day, spec);
  std::vector<int> effective;
  for (int h = 0; h < 24; ++h) {
    const StepOutcome out = step(s, 0, day, spec);
    effective.push_back(out.effective_action);
    s = out.next_state;
  }
  CHECK(s.hour == 24);
  CHECK(s.remaining_task == 0);
  for (int h = 0; h < 22; ++h) CHECK(effective[h] == 0);
  CHECK(effective[22] == 1);
  CHECK(effective[23] == 1);
}

TEST_CASE("stepping a terminal state is an error") {
  DayProfile day = flat_day();
  ApplianceSpec spec;
  EnvState s = reset(day, spec);
  for (int h = 0; h < 24; ++h) s = step(s, 0, day, spec).next_state;
  CHECK_THROWS_AS(step(s, 0, day, spec), ValidationError);
}

TEST_CASE("terminal state carries the last hour's observations") {
  DayProfile day = flat_day();
  day.price[23] = 0.77;
  ApplianceSpec spec;
  EnvState s = reset(day, spec);
  for (int h = 0; h < 24; ++h) s = step(s, 1, day, spec).next_state;
  CHECK(s.hour == 24);
  CHECK(s.price_obs == 0.77);
}

TEST_CASE("snapshot/restore replays identically") {
  DayProfile day = flat_day();
  day.price = {0.3, 0.1, 0.4, 0.1, 0.5, 0.9, 0.2, 0.6, 0.5, 0.3, 0.5, 0.8,
               0.9, 0.7, 0.9, 0.3, 0.2, 0.3, 0.8, 0.4, 0.6, 0.2, 0.6, 0.3};
  Simulator sim{ApplianceSpec{}};
  sim.register_day(day);

  SUBCASE("snapshot at hour 0 equals reset output") {
    const EnvState fresh = sim.reset(day.date.to_string());
    const Snapshot snap = sim.snapshot();
    CHECK(snap.env_state == fresh);
    CHECK(snap.accrued_cost == 0.0);
  }

  SUBCASE("mid-episode restore continues bit-identically") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<int> suffix(14);
    for (int& a : suffix) a = coin(rng);

    sim.reset(day.date.to_string());
    for (int h = 0; h < 10; ++h) sim.step(coin(rng));
    const Snapshot snap = sim.snapshot();

    std::vector<double> rewards_a;
    for (int a : suffix) rewards_a.push_back(sim.step(a).reward);
    const double cost_a = sim.accrued_cost();

    sim.restore(snap);
    std::vector<double> rewards_b;
    for (int a : suffix) rewards_b.push_back(sim.step(a).reward);

    CHECK(rewards_a == rewards_b);
    CHECK(sim.accrued_cost() == cost_a);
  }

  SUBCASE("restore with an unregistered day fails") {
    sim.reset(day.date.to_string());
    Snapshot snap = sim.snapshot();
    snap.day_ref = "1999-01-01";
    CHECK_THROWS_AS(sim.restore(snap), ValidationError);
  }
}

TEST_CASE("episode invariants hold under random play") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> level(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  ApplianceSpec spec;

  for (int trial = 0; trial < 200; ++trial) {
    DayProfile day = flat_day();
    for (int h = 0; h < 24; ++h) {
      day.price[h] = 0.5 * level(rng);
      day.background[h] = 2.0 * level(rng);
      day.renewable[h] = 2.5 * level(rng);
    }
    Simulator sim(spec);
    sim.register_day(day);
    sim.reset(day.date.to_string());

    double return_sum = 0.0;
    int on_hours = 0;
    while (!sim.done()) {
      const StepOutcome out = sim.step(coin(rng));
      CHECK(out.reward <= 0.0);
      return_sum += out.reward;
      on_hours += out.effective_action;
    }
    CHECK(on_hours == spec.required_hours);
    CHECK(return_sum == -sim.accrued_cost());
  }
}
