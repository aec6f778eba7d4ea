#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "hems/neuralnet.hpp"
#include "hems/report.hpp"
#include "hems/training_env.hpp"

namespace hems {

struct PpoConfig {
  int episodes = 60;
  double learning_rate = 0.001;
  double discount = 1.0;
  int batch_size = 64;       // transitions collected per update
  double kl_target = 0.01;
  double entropy_weight = 0.001;
  int epochs_per_batch = 4;
  // The baseline must track returns much faster than the policy moves or the
  // normalized advantages carry a timestep bias; regression passes are cheap.
  int value_epochs_per_batch = 40;
  std::vector<int> hidden = {32, 32, 32};
  double initial_beta = 1.0;

  void validate() const;
};

struct Transition {
  Eigen::VectorXd state;
  int action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
  double log_prob = 0.0;  // behavior policy log-probability of `action`
};

/// Policy net (softmax head) plus value baseline and their optimizers. `beta`
/// is the adaptive KL penalty coefficient.
struct PpoAgent {
  MlpSpec policy_spec;
  MlpParams policy;
  MlpSpec value_spec;
  MlpParams value;
  AdamOptimizer policy_opt;
  AdamOptimizer value_opt;
  double beta = 1.0;
};

PpoAgent make_ppo_agent(int observation_dim, const PpoConfig& config, std::mt19937_64& rng);

/// Samples whole episodes from the softmax policy until at least
/// `min_transitions` are collected (episode boundaries preserved via `done`).
std::vector<Transition> collect_rollouts(const MlpSpec& policy_spec, const MlpParams& policy,
                                         TrainingEnv& env, int min_transitions,
                                         std::mt19937_64& rng, int* episodes_collected = nullptr,
                                         std::vector<double>* episode_returns = nullptr);

struct AdvantageResult {
  Eigen::VectorXd advantages;     // normalized to zero mean / unit variance
  Eigen::VectorXd returns_to_go;  // discounted suffix sums within episodes
};

AdvantageResult compute_advantages(const std::vector<Transition>& transitions,
                                   const MlpSpec& value_spec, const MlpParams& value_params,
                                   double discount);

/// The adaptive-KL rule: doubles beta when the measured KL overshoots 1.5x the
/// target, halves it below target/1.5, clamped to [1e-6, 1e6].
double adapt_beta(double beta, double measured_kl, double kl_target);

struct PpoUpdateStats {
  double kl = 0.0;        // KL(old || new) after the epochs
  double entropy = 0.0;   // mean policy entropy after the epochs
  double value_loss = 0.0;
  double beta_after = 0.0;
};

/// Maximizes E[ratio * advantage] - beta * KL(old||new) + entropy_weight * H
/// over `epochs_per_batch` full-batch gradient steps; regresses the value net
/// to the returns-to-go alongside. Updates beta afterwards.
PpoUpdateStats ppo_update(PpoAgent& agent, const std::vector<Transition>& batch,
                          const AdvantageResult& advantages, const PpoConfig& config);

/// Collect/update loop for `episodes` episodes on `env`. The optional stop
/// callback runs after every update; returning true ends training early.
void run_ppo_training(PpoAgent& agent, TrainingEnv& env, const PpoConfig& config, int episodes,
                      std::mt19937_64& rng, TrainReport& report,
                      const std::function<bool(const PpoAgent&)>& stop_early = {});

struct PpoTrainResult {
  PpoAgent agent;
  TrainReport report;
};

/// Fresh agent trained on `env`; deterministic in `seed`. The report's
/// final_eval_cost is the greedy-policy episode cost after training.
PpoTrainResult train_ppo(EnergyEnv& env, const PpoConfig& config, std::uint64_t seed);

}  // namespace hems
