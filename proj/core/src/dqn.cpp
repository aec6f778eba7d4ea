#include "hems/dqn.hpp"

#include <algorithm>
#include <cmath>

#include "hems/errors.hpp"
#include "hems/eval.hpp"

namespace hems {

void EpsilonSchedule::validate() const {
  if (start < 0.0 || start > 1.0 || end < 0.0 || end > 1.0) {
    throw ValidationError("epsilon bounds must be in [0, 1]");
  }
  if (!(decay_fraction > 0.0) || decay_fraction > 1.0) {
    throw ValidationError("epsilon decay fraction must be in (0, 1]");
  }
}

double epsilon_at(long step, const EpsilonSchedule& schedule, long total_steps) {
  schedule.validate();
  if (step < 0) {
    throw ValidationError("epsilon_at step must be >= 0");
  }
  if (total_steps < 1) {
    throw ValidationError("epsilon_at total_steps must be >= 1");
  }
  const double window = schedule.decay_fraction * static_cast<double>(total_steps);
  if (static_cast<double>(step) >= window) {
    return schedule.end;
  }
  const double t = static_cast<double>(step) / window;
  return schedule.start + t * (schedule.end - schedule.start);
}

void DqnConfig::validate() const {
  if (episodes < 0) throw ValidationError("dqn episodes must be >= 0");
  if (!(learning_rate > 0.0)) throw ValidationError("dqn learning rate must be positive");
  if (!(discount > 0.0) || discount > 1.0) throw ValidationError("discount must be in (0, 1]");
  if (batch_size < 1) throw ValidationError("dqn batch size must be >= 1");
  if (replay_capacity < batch_size) {
    throw ValidationError("replay capacity must hold at least one batch");
  }
  if (target_sync_interval < 1) throw ValidationError("target sync interval must be >= 1");
  epsilon.validate();
  for (int w : hidden) {
    if (w < 1) throw ValidationError("hidden widths must be >= 1");
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) {
    throw ValidationError("replay capacity must be >= 1");
  }
}

void ReplayBuffer::push(Transition t) {
  buffer_.push_back(std::move(t));
  if (buffer_.size() > capacity_) {
    buffer_.pop_front();
  }
}

double td_target(double reward, const Eigen::VectorXd& next_state, bool done,
                 const MlpSpec& spec, const MlpParams& target_net, double discount) {
  if (done) {
    return reward;
  }
  const Eigen::VectorXd q = forward(spec, target_net, next_state);
  return reward + discount * q.maxCoeff();
}

DqnTrainer::DqnTrainer(TrainingEnv& env, const DqnConfig& config, std::uint64_t seed)
    : env_(env),
      config_(config),
      buffer_(static_cast<std::size_t>(std::max(config.replay_capacity, 1))),
      rng_(seed) {
  config_.validate();
  spec_ = MlpSpec{env.observation_dim(), config_.hidden, kNumActions, Activation::kTanh,
                  Head::kLinearQ};
  online_ = init_params(spec_, rng_);
  target_ = online_;
  optimizer_ = AdamOptimizer(spec_, config_.learning_rate);
  total_steps_ = static_cast<long>(config_.episodes) * static_cast<long>(env.horizon());
  report_.phase = "dqn";
}

void DqnTrainer::update_once() {
  const Eigen::Index batch = config_.batch_size;
  std::uniform_int_distribution<std::size_t> pick(0, buffer_.size() - 1);

  Eigen::MatrixXd states(batch, spec_.input_dim);
  Eigen::MatrixXd next_states(batch, spec_.input_dim);
  Eigen::VectorXd rewards(batch);
  std::vector<int> actions(static_cast<std::size_t>(batch));
  std::vector<bool> done(static_cast<std::size_t>(batch));
  for (Eigen::Index i = 0; i < batch; ++i) {
    const Transition& t = buffer_[pick(rng_)];
    states.row(i) = t.state.transpose();
    next_states.row(i) = t.next_state.transpose();
    rewards(i) = t.reward;
    actions[static_cast<std::size_t>(i)] = t.action;
    done[static_cast<std::size_t>(i)] = t.done;
  }

  // batched equivalent of td_target per row
  const Eigen::MatrixXd next_q = forward_batch(spec_, target_, next_states);
  Eigen::VectorXd targets(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    targets(i) = done[static_cast<std::size_t>(i)]
                     ? rewards(i)
                     : rewards(i) + config_.discount * next_q.row(i).maxCoeff();
  }

  const Eigen::MatrixXd q = forward_batch(spec_, online_, states);
  if (!q.allFinite()) {
    throw NumericError("Q-values diverged during training");
  }
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(batch, kNumActions);
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    upstream(i, a) = 2.0 * (q(i, a) - targets(i)) * inv_b;
  }
  optimizer_.apply(online_, backward_batch(spec_, online_, states, upstream));
}

void DqnTrainer::run_episode() {
  Eigen::VectorXd obs = env_.reset();
  double episode_return = 0.0;
  double eps = 0.0;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, kNumActions - 1);

  bool done = false;
  while (!done) {
    eps = epsilon_at(steps_done_, config_.epsilon, std::max(total_steps_, 1L));
    int action;
    if (uniform(rng_) < eps) {
      action = random_action(rng_);
    } else {
      action = greedy_action(spec_, online_, obs);
    }
    const auto out = env_.step(action);
    buffer_.push(Transition{obs, action, out.reward, out.observation, out.done, 0.0});
    episode_return += out.reward;
    obs = out.observation;
    done = out.done;

    if (buffer_.size() >= static_cast<std::size_t>(config_.batch_size)) {
      update_once();
    }
    ++steps_done_;
    if (steps_done_ % config_.target_sync_interval == 0) {
      target_ = online_;
    }
  }
  report_.episode_returns.push_back(episode_return);
  report_.epsilon.push_back(eps);
}

DqnTrainResult train_dqn(EnergyEnv& env, const DqnConfig& config, std::uint64_t seed) {
  config.validate();
  DqnTrainer trainer(env, config, seed);
  for (int ep = 0; ep < config.episodes; ++ep) {
    trainer.run_episode();
  }
  DqnTrainResult result;
  result.spec = trainer.spec();
  result.q_net = trainer.online();
  result.report = std::move(trainer.report());
  result.report.final_eval_cost =
      greedy_day_cost(result.spec, result.q_net, env.day(), env.appliance(), env.normalizer());
  return result;
}

}  // namespace hems
