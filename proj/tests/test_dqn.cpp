#include "hems/dqn.hpp"

#include <random>

#include "doctest.h"
#include "hems/data_pipeline.hpp"
#include "hems/errors.hpp"
#include "hems/eval.hpp"
#include "hems/oracle.hpp"

using namespace hems;

namespace {

// a Q-net with no hidden layers: outputs are exactly the biases
MlpParams fixed_q(const MlpSpec& spec, double q0, double q1) {
  MlpParams p = zero_params(spec);
  p.biases[0](0) = q0;
  p.biases[0](1) = q1;
  return p;
}

DayProfile toy_day() {
  DayProfile d;
  d.date = Date{2021, 5, 1};
  d.price = {0.1, 0.4, 0.2, 0.3};
  d.background = {0.0, 0.0, 0.0, 0.0};
  d.renewable = {0.0, 0.0, 0.0, 0.0};
  return d;
}

}  // namespace

TEST_CASE("td_target bootstraps from the target network unless terminal") {
  const MlpSpec spec{2, {}, 2, Activation::kTanh, Head::kLinearQ};
  const MlpParams net = fixed_q(spec, -2.0, -5.0);
  const Eigen::Vector2d s{0.1, 0.2};

  CHECK(td_target(-0.13, s, true, spec, net, 1.0) == doctest::Approx(-0.13));
  CHECK(td_target(-1.0, s, false, spec, net, 1.0) == doctest::Approx(-3.0));
  CHECK(td_target(-1.0, s, false, spec, net, 0.0) == doctest::Approx(-1.0));
  CHECK(td_target(-1.0, s, false, spec, net, 0.5) == doctest::Approx(-2.0));
}

TEST_CASE("epsilon decays linearly then stays at the floor") {
  const EpsilonSchedule sched;  // 1.0 -> 0.05 over 80% of steps
  const long total = 1000;
  CHECK(epsilon_at(0, sched, total) == doctest::Approx(1.0));
  CHECK(epsilon_at(400, sched, total) == doctest::Approx((1.0 + 0.05) / 2.0));
  CHECK(epsilon_at(800, sched, total) == doctest::Approx(0.05));
  CHECK(epsilon_at(999, sched, total) == doctest::Approx(0.05));
  CHECK_THROWS_AS(epsilon_at(-1, sched, total), ValidationError);
  CHECK_THROWS_AS(epsilon_at(0, sched, 0), ValidationError);

  EpsilonSchedule bad;
  bad.start = 1.5;
  CHECK_THROWS_AS(epsilon_at(0, bad, total), ValidationError);
}

TEST_CASE("replay buffer evicts strictly oldest-first") {
  ReplayBuffer buffer(3);
  auto push = [&](double reward) {
    Transition t;
    t.state = Eigen::VectorXd::Zero(1);
    t.next_state = Eigen::VectorXd::Zero(1);
    t.reward = reward;
    buffer.push(t);
  };
  push(1);
  push(2);
  CHECK(buffer.size() == 2);
  push(3);
  push(4);  // evicts reward 1
  CHECK(buffer.size() == 3);
  CHECK(buffer[0].reward == 2);
  CHECK(buffer[1].reward == 3);
  CHECK(buffer[2].reward == 4);
  push(5);  // evicts reward 2
  CHECK(buffer[0].reward == 3);

  CHECK_THROWS_AS(ReplayBuffer(0), ValidationError);
}

TEST_CASE("target network equals the online one exactly at sync points") {
  auto days = synth_generate(7, 1);
  Normalizer norm = Normalizer::fit(std::span(&days[0], 1));
  const ApplianceSpec spec;

  DqnConfig config;
  config.episodes = 4;
  config.batch_size = 8;
  config.replay_capacity = 256;

  SUBCASE("sync interval equal to the horizon lands on episode ends") {
    config.target_sync_interval = 24;
    EnergyEnv env(days[0], spec, norm);
    DqnTrainer trainer(env, config, 3);
    for (int ep = 0; ep < 3; ++ep) {
      trainer.run_episode();
      for (std::size_t l = 0; l < trainer.online().weights.size(); ++l) {
        CHECK(trainer.online().weights[l] == trainer.target().weights[l]);
      }
    }
  }

  SUBCASE("between syncs the online net runs ahead") {
    config.target_sync_interval = 7;  // last sync at step 21, updates continue to 24
    EnergyEnv env(days[0], spec, norm);
    DqnTrainer trainer(env, config, 3);
    trainer.run_episode();
    bool differs = false;
    for (std::size_t l = 0; l < trainer.online().weights.size(); ++l) {
      if (trainer.online().weights[l] != trainer.target().weights[l]) differs = true;
    }
    CHECK(differs);
  }
}

TEST_CASE("dqn training is deterministic in its seed") {
  auto days = synth_generate(7, 1);
  Normalizer norm = Normalizer::fit(std::span(&days[0], 1));
  DqnConfig config;
  config.episodes = 20;

  EnergyEnv env_a(days[0], ApplianceSpec{}, norm);
  const DqnTrainResult a = train_dqn(env_a, config, 11);
  EnergyEnv env_b(days[0], ApplianceSpec{}, norm);
  const DqnTrainResult b = train_dqn(env_b, config, 11);
  for (std::size_t l = 0; l < a.q_net.weights.size(); ++l) {
    CHECK(a.q_net.weights[l] == b.q_net.weights[l]);
  }
  CHECK(a.report.episode_returns == b.report.episode_returns);
  CHECK(a.report.epsilon.size() == a.report.episode_returns.size());
}

TEST_CASE("dqn beats the random baseline on its training day") {
  auto days = synth_generate(7, 1);
  Normalizer norm = Normalizer::fit(std::span(&days[0], 1));
  const ApplianceSpec spec;
  DqnConfig config;
  config.episodes = 400;

  EnergyEnv env(days[0], spec, norm);
  const DqnTrainResult result = train_dqn(env, config, 5);

  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coin(0, 1);
  double random_total = 0.0;
  const int rollouts = 1000;
  for (int k = 0; k < rollouts; ++k) {
    EnvState s = reset_episode(days[0], spec);
    while (s.hour < 24) {
      const StepOutcome out = step(s, coin(rng), days[0], spec);
      random_total += -out.reward;
      s = out.next_state;
    }
  }
  CHECK(result.report.final_eval_cost <= random_total / rollouts);
}

TEST_CASE("dqn reaches the oracle optimum on the 4-hour toy day") {
  const DayProfile day = toy_day();
  const ApplianceSpec spec{1.0, 2};
  Normalizer norm = Normalizer::fit(std::span(&day, 1));

  const double optimum = solve_day(day, spec).optimal_cost;
  REQUIRE(optimum == doctest::Approx(0.30));

  DqnConfig config;
  config.episodes = 600;
  config.batch_size = 16;
  config.replay_capacity = 2000;
  config.target_sync_interval = 40;

  EnergyEnv env(day, spec, norm);
  const DqnTrainResult result = train_dqn(env, config, 3);
  CHECK(result.report.final_eval_cost == doctest::Approx(optimum));
}

TEST_CASE("dqn config validation rejects broken settings") {
  DqnConfig config;
  config.replay_capacity = 8;
  config.batch_size = 64;
  CHECK_THROWS_AS(config.validate(), ValidationError);

  DqnConfig negative;
  negative.learning_rate = 0.0;
  CHECK_THROWS_AS(negative.validate(), ValidationError);
}
