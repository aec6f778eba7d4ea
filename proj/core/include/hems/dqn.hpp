#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "hems/neuralnet.hpp"
#include "hems/ppo.hpp"  // Transition
#include "hems/report.hpp"
#include "hems/training_env.hpp"

namespace hems {

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  double decay_fraction = 0.8;  // of total env steps

  void validate() const;
};

/// Linear decay from start to end over decay_fraction * total_steps, constant
/// afterwards.
double epsilon_at(long step, const EpsilonSchedule& schedule, long total_steps);

struct DqnConfig {
  int episodes = 5000;
  double learning_rate = 0.001;
  double discount = 1.0;
  int batch_size = 64;
  std::vector<int> hidden = {32, 32, 16};
  int replay_capacity = 10000;
  int target_sync_interval = 100;  // env steps between target syncs
  EpsilonSchedule epsilon;

  void validate() const;
};

/// Fixed-capacity FIFO transition store. Index 0 is the oldest element.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return buffer_[i]; }

 private:
  std::deque<Transition> buffer_;
  std::size_t capacity_;
};

/// reward if done, else reward + discount * max_a target_net(next_state)[a].
double td_target(double reward, const Eigen::VectorXd& next_state, bool done,
                 const MlpSpec& spec, const MlpParams& target_net, double discount);

/// One-step Q-learning with replay and a periodically synced target network.
/// Exposed as a class so the sync/update cadence is observable; train_dqn is
/// the plain entry point.
class DqnTrainer {
 public:
  DqnTrainer(TrainingEnv& env, const DqnConfig& config, std::uint64_t seed);

  /// Runs one episode: epsilon-greedy actions, replay writes, one gradient
  /// step per env step once the buffer holds a batch, target syncs on the
  /// configured interval.
  void run_episode();

  const MlpSpec& spec() const { return spec_; }
  const MlpParams& online() const { return online_; }
  const MlpParams& target() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  long steps_done() const { return steps_done_; }
  TrainReport& report() { return report_; }

 private:
  void update_once();

  TrainingEnv& env_;
  DqnConfig config_;
  MlpSpec spec_;
  MlpParams online_;
  MlpParams target_;
  AdamOptimizer optimizer_;
  ReplayBuffer buffer_;
  std::mt19937_64 rng_;
  long steps_done_ = 0;
  long total_steps_ = 0;
  TrainReport report_;
};

struct DqnTrainResult {
  MlpSpec spec;
  MlpParams q_net;
  TrainReport report;
};

/// Trains for config.episodes episodes; deterministic in seed. The report's
/// final_eval_cost is the greedy episode cost after training.
DqnTrainResult train_dqn(EnergyEnv& env, const DqnConfig& config, std::uint64_t seed);

}  // namespace hems
