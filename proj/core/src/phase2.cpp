#include "hems/phase2.hpp"

#include "hems/errors.hpp"
#include "hems/eval.hpp"

namespace hems {

double cloning_reward(const EnvState& next_state, int t, const Demonstration& demo) {
  const int horizon = static_cast<int>(demo.states.size()) - 1;
  if (t < 1 || t > horizon) {
    throw ValidationError("cloning reward timestep " + std::to_string(t) + " outside 1.." +
                          std::to_string(horizon));
  }
  return cell_of(next_state) == cell_of(demo.states[static_cast<std::size_t>(t)]) ? 1.0 : 0.0;
}

CloningEnv::CloningEnv(DayProfile day, ApplianceSpec spec, Normalizer norm, Demonstration demo)
    : day_(std::move(day)), spec_(spec), norm_(norm), demo_(std::move(demo)) {
  day_.validate();
  spec_.validate();
  if (static_cast<int>(demo_.states.size()) != day_.hours() + 1) {
    throw ValidationError("demonstration length does not match the day horizon");
  }
  if (demo_.day != day_.date) {
    throw ValidationError("demonstration is for a different day than the environment");
  }
}

Eigen::VectorXd CloningEnv::reset() {
  state_ = reset_episode(day_, spec_);
  started_ = true;
  return norm_.observe(state_, spec_);
}

TrainingEnv::Step CloningEnv::step(int action) {
  if (!started_) {
    throw ValidationError("step before reset");
  }
  const StepOutcome out = hems::step(state_, action, day_, spec_);
  state_ = out.next_state;
  // imitation signal only; out.reward (the billed cost) is discarded. The
  // reward depends on the cell projection alone, so an episode that diverges
  // collects zeros while misaligned and earns again once the cells match.
  const double reward = cloning_reward(state_, state_.hour, demo_);
  return Step{norm_.observe(state_, spec_), reward, out.done, out.effective_action};
}

int greedy_alignment(const PpoAgent& agent, const DayProfile& day, const ApplianceSpec& spec,
                     const Normalizer& norm, const Demonstration& demo) {
  EnergyEnv env(day, spec, norm);
  Eigen::VectorXd obs = env.reset();
  int aligned = 0;
  while (true) {
    const auto out = env.step(greedy_action(agent.policy_spec, agent.policy, obs));
    if (cell_of(env.raw_state()) ==
        cell_of(demo.states[static_cast<std::size_t>(env.raw_state().hour)])) {
      ++aligned;
    }
    if (out.done) break;
    obs = out.observation;
  }
  return aligned;
}

Phase2Result train_clone(const Demonstration& demo, const DayProfile& day,
                         const ApplianceSpec& spec, const Normalizer& norm,
                         const PpoConfig& config, int episode_budget, std::uint64_t seed) {
  config.validate();
  if (episode_budget < 0) {
    throw ValidationError("episode budget must be >= 0");
  }
  std::mt19937_64 rng(seed);
  CloningEnv env(day, spec, norm, demo);

  Phase2Result result;
  result.agent = make_ppo_agent(env.observation_dim(), config, rng);
  result.report.phase = "clone";

  const int horizon = day.hours();
  const auto fully_aligned = [&](const PpoAgent& agent) {
    return greedy_alignment(agent, day, spec, norm, demo) == horizon;
  };
  run_ppo_training(result.agent, env, config, episode_budget, rng, result.report, fully_aligned);

  result.report.warning = !fully_aligned(result.agent);
  result.report.final_eval_cost =
      greedy_day_cost(result.agent.policy_spec, result.agent.policy, day, spec, norm);
  return result;
}

Phase2Result robustify(const PpoAgent& cloned, const DayProfile& day, const ApplianceSpec& spec,
                       const Normalizer& norm, const PpoConfig& config, int episode_budget,
                       std::uint64_t seed) {
  config.validate();
  if (episode_budget < 0) {
    throw ValidationError("episode budget must be >= 0");
  }
  std::mt19937_64 rng(seed);
  EnergyEnv env(day, spec, norm);

  Phase2Result result;
  result.agent = cloned;
  // fresh baseline: the cloning value net predicts alignment returns, not costs
  result.agent.value = init_params(result.agent.value_spec, rng);
  result.agent.value_opt = AdamOptimizer(result.agent.value_spec, config.learning_rate);
  result.agent.policy_opt = AdamOptimizer(result.agent.policy_spec, config.learning_rate);
  result.agent.beta = config.initial_beta;
  result.report.phase = "robustify";

  MlpParams best_policy = result.agent.policy;
  double best_cost = greedy_day_cost(result.agent.policy_spec, best_policy, day, spec, norm);
  const auto keep_cheapest = [&](const PpoAgent& agent) {
    const double cost = greedy_day_cost(agent.policy_spec, agent.policy, day, spec, norm);
    if (cost < best_cost) {
      best_cost = cost;
      best_policy = agent.policy;
    }
    return false;  // never stops early
  };
  run_ppo_training(result.agent, env, config, episode_budget, rng, result.report, keep_cheapest);

  result.agent.policy = best_policy;
  result.report.final_eval_cost = best_cost;
  return result;
}

}  // namespace hems
