#include "hems/ppo.hpp"

#include <algorithm>
#include <cmath>

#include "hems/errors.hpp"
#include "hems/eval.hpp"

namespace hems {

namespace {

constexpr double kBetaMin = 1e-6;
constexpr double kBetaMax = 1e6;
constexpr double kProbFloor = 1e-12;  // keeps log/ratio terms finite
constexpr double kRatioCap = 2.0;     // importance-weight truncation in the gradient

double safe_log(double p) { return std::log(std::max(p, kProbFloor)); }

Eigen::MatrixXd stack_states(const std::vector<Transition>& batch) {
  Eigen::MatrixXd states(static_cast<Eigen::Index>(batch.size()), batch.front().state.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    states.row(static_cast<Eigen::Index>(i)) = batch[i].state.transpose();
  }
  return states;
}

double mean_kl(const Eigen::MatrixXd& old_probs, const Eigen::MatrixXd& new_probs) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < old_probs.rows(); ++i) {
    for (Eigen::Index k = 0; k < old_probs.cols(); ++k) {
      const double p = old_probs(i, k);
      if (p > 0.0) {
        total += p * (safe_log(p) - safe_log(new_probs(i, k)));
      }
    }
  }
  return total / static_cast<double>(old_probs.rows());
}

double mean_entropy(const Eigen::MatrixXd& probs) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      const double p = probs(i, k);
      if (p > 0.0) total -= p * safe_log(p);
    }
  }
  return total / static_cast<double>(probs.rows());
}

}  // namespace

void PpoConfig::validate() const {
  if (episodes < 0) throw ValidationError("ppo episodes must be >= 0");
  if (!(learning_rate > 0.0)) throw ValidationError("ppo learning rate must be positive");
  if (!(discount > 0.0) || discount > 1.0) throw ValidationError("discount must be in (0, 1]");
  if (batch_size < 2) throw ValidationError("ppo batch size must be >= 2");
  if (!(kl_target > 0.0)) throw ValidationError("kl target must be positive");
  if (entropy_weight < 0.0) throw ValidationError("entropy weight must be >= 0");
  if (epochs_per_batch < 1) throw ValidationError("epochs per batch must be >= 1");
  if (value_epochs_per_batch < 1) throw ValidationError("value epochs per batch must be >= 1");
  if (!(initial_beta > 0.0)) throw ValidationError("initial beta must be positive");
  for (int w : hidden) {
    if (w < 1) throw ValidationError("hidden widths must be >= 1");
  }
}

PpoAgent make_ppo_agent(int observation_dim, const PpoConfig& config, std::mt19937_64& rng) {
  config.validate();
  PpoAgent agent;
  agent.policy_spec = MlpSpec{observation_dim, config.hidden, kNumActions, Activation::kTanh,
                              Head::kSoftmaxPolicy};
  agent.value_spec =
      MlpSpec{observation_dim, config.hidden, 1, Activation::kTanh, Head::kLinearValue};
  agent.policy = init_params(agent.policy_spec, rng);
  agent.value = init_params(agent.value_spec, rng);
  agent.policy_opt = AdamOptimizer(agent.policy_spec, config.learning_rate);
  agent.value_opt = AdamOptimizer(agent.value_spec, config.learning_rate);
  agent.beta = config.initial_beta;
  return agent;
}

std::vector<Transition> collect_rollouts(const MlpSpec& policy_spec, const MlpParams& policy,
                                         TrainingEnv& env, int min_transitions,
                                         std::mt19937_64& rng, int* episodes_collected,
                                         std::vector<double>* episode_returns) {
  if (min_transitions < 1) {
    throw ValidationError("min_transitions must be >= 1");
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Transition> transitions;
  int episodes = 0;
  while (static_cast<int>(transitions.size()) < min_transitions) {
    Eigen::VectorXd obs = env.reset();
    double episode_return = 0.0;
    bool done = false;
    while (!done) {
      const Eigen::VectorXd probs = forward(policy_spec, policy, obs);
      const double u = uniform(rng);
      int action = static_cast<int>(probs.size()) - 1;
      double cumulative = 0.0;
      for (Eigen::Index a = 0; a < probs.size(); ++a) {
        cumulative += probs(a);
        if (u < cumulative) {
          action = static_cast<int>(a);
          break;
        }
      }
      const auto out = env.step(action);
      transitions.push_back(Transition{obs, action, out.reward, out.observation, out.done,
                                       std::min(safe_log(probs(action)), 0.0)});
      episode_return += out.reward;
      obs = out.observation;
      done = out.done;
    }
    ++episodes;
    if (episode_returns) episode_returns->push_back(episode_return);
  }
  if (episodes_collected) *episodes_collected = episodes;
  return transitions;
}

AdvantageResult compute_advantages(const std::vector<Transition>& transitions,
                                   const MlpSpec& value_spec, const MlpParams& value_params,
                                   double discount) {
  if (transitions.empty()) {
    throw ValidationError("cannot compute advantages of an empty batch");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(transitions.size());

  AdvantageResult result;
  result.returns_to_go.resize(n);
  double suffix = 0.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    // episode boundary: the suffix restarts at terminal transitions
    if (transitions[i].done) suffix = 0.0;
    suffix = transitions[i].reward + discount * suffix;
    result.returns_to_go(i) = suffix;
  }

  const Eigen::MatrixXd values =
      forward_batch(value_spec, value_params, stack_states(transitions));
  Eigen::VectorXd raw = result.returns_to_go - values.col(0);

  const double mean = raw.mean();
  const double variance = (raw.array() - mean).square().sum() / static_cast<double>(n);
  result.advantages = (raw.array() - mean) / (std::sqrt(variance) + 1e-8);
  return result;
}

double adapt_beta(double beta, double measured_kl, double kl_target) {
  if (measured_kl > 1.5 * kl_target) {
    beta *= 2.0;
  } else if (measured_kl < kl_target / 1.5) {
    beta /= 2.0;
  }
  return std::clamp(beta, kBetaMin, kBetaMax);
}

PpoUpdateStats ppo_update(PpoAgent& agent, const std::vector<Transition>& batch,
                          const AdvantageResult& advantages, const PpoConfig& config) {
  config.validate();
  if (batch.size() < 2) {
    throw ValidationError("ppo_update needs a batch of at least 2 transitions");
  }
  if (advantages.advantages.size() != static_cast<Eigen::Index>(batch.size())) {
    throw ValidationError("advantage vector does not match batch size");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::MatrixXd states = stack_states(batch);

  // the behavior distribution is frozen at update start
  const Eigen::MatrixXd old_probs = forward_batch(agent.policy_spec, agent.policy, states);

  for (int epoch = 0; epoch < config.epochs_per_batch; ++epoch) {
    const Eigen::MatrixXd probs = forward_batch(agent.policy_spec, agent.policy, states);

    // Loss (minimized): -(1/n) sum_i [ratio_i * A_i - beta * KL_i + w_H * H_i].
    // Gradient w.r.t. the output probabilities, row i:
    //   surrogate: -A_i * min(ratio_i, cap) / p_new(a_i) at column a_i, which is
    //     -A_i/p_old(a_i) until the truncation bites; capping the importance
    //     weight keeps rarely-sampled actions from producing huge steps
    //   KL(old||new): -beta * p_old_k / p_k  (softmax backprop restores p_new - p_old)
    //   entropy: +w_H * (log p_k + 1)
    Eigen::MatrixXd upstream(n, probs.cols());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double adv = advantages.advantages(i);
      const int action = batch[static_cast<std::size_t>(i)].action;
      const double p_old_taken = std::max(old_probs(i, action), 1e-8);
      const double ratio = probs(i, action) / p_old_taken;
      double kl_i = 0.0;
      double entropy_i = 0.0;
      for (Eigen::Index k = 0; k < probs.cols(); ++k) {
        const double p_new = probs(i, k);
        const double p_old = old_probs(i, k);
        double g = config.entropy_weight * (safe_log(p_new) + 1.0);
        g -= agent.beta * p_old / std::max(p_new, 1e-8);
        if (static_cast<int>(k) == action) {
          g -= adv * std::min(ratio, kRatioCap) / std::max(p_new, 1e-8);
        }
        upstream(i, k) = g * inv_n;
        if (p_old > 0.0) kl_i += p_old * (safe_log(p_old) - safe_log(p_new));
        if (p_new > 0.0) entropy_i -= p_new * safe_log(p_new);
      }
      loss += -(ratio * adv - agent.beta * kl_i + config.entropy_weight * entropy_i) * inv_n;
    }
    if (!std::isfinite(loss)) {
      throw NumericError("ppo policy loss is not finite");
    }
    agent.policy_opt.apply(agent.policy,
                           backward_batch(agent.policy_spec, agent.policy, states, upstream));
  }

  // value regression toward the returns-to-go
  for (int epoch = 0; epoch < config.value_epochs_per_batch; ++epoch) {
    const Eigen::MatrixXd values = forward_batch(agent.value_spec, agent.value, states);
    const Eigen::VectorXd err = values.col(0) - advantages.returns_to_go;
    if (!err.allFinite()) {
      throw NumericError("ppo value loss is not finite");
    }
    const Eigen::MatrixXd value_upstream = (2.0 * inv_n) * err;
    agent.value_opt.apply(agent.value, backward_batch(agent.value_spec, agent.value, states,
                                                      value_upstream));
  }

  const Eigen::MatrixXd new_probs = forward_batch(agent.policy_spec, agent.policy, states);
  PpoUpdateStats stats;
  stats.kl = mean_kl(old_probs, new_probs);
  stats.entropy = mean_entropy(new_probs);
  const Eigen::MatrixXd values = forward_batch(agent.value_spec, agent.value, states);
  stats.value_loss =
      (values.col(0) - advantages.returns_to_go).array().square().sum() * inv_n;
  agent.beta = adapt_beta(agent.beta, stats.kl, config.kl_target);
  stats.beta_after = agent.beta;
  return stats;
}

void run_ppo_training(PpoAgent& agent, TrainingEnv& env, const PpoConfig& config, int episodes,
                      std::mt19937_64& rng, TrainReport& report,
                      const std::function<bool(const PpoAgent&)>& stop_early) {
  config.validate();
  int episodes_done = 0;
  while (episodes_done < episodes) {
    int collected = 0;
    const auto batch = collect_rollouts(agent.policy_spec, agent.policy, env, config.batch_size,
                                        rng, &collected, &report.episode_returns);
    episodes_done += collected;
    const AdvantageResult adv =
        compute_advantages(batch, agent.value_spec, agent.value, config.discount);
    const PpoUpdateStats stats = ppo_update(agent, batch, adv, config);
    for (int i = 0; i < collected; ++i) {
      report.kl.push_back(stats.kl);
      report.entropy.push_back(stats.entropy);
    }
    if (stop_early && stop_early(agent)) {
      break;
    }
  }
}

PpoTrainResult train_ppo(EnergyEnv& env, const PpoConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  PpoTrainResult result;
  result.agent = make_ppo_agent(env.observation_dim(), config, rng);
  result.report.phase = "ppo";
  run_ppo_training(result.agent, env, config, config.episodes, rng, result.report);
  result.report.final_eval_cost = greedy_day_cost(result.agent.policy_spec, result.agent.policy,
                                                  env.day(), env.appliance(), env.normalizer());
  return result;
}

}  // namespace hems
