#pragma once

#include <cstdint>

#include "hems/goexplore.hpp"
#include "hems/ppo.hpp"
#include "hems/training_env.hpp"

namespace hems {

/// Imitation reward: 1 when the reached state falls in the same archive cell as
/// the demonstration's state at timestep t (1-based), else 0. The billed cost
/// never leaks into this signal. t ranges over 1..horizon.
double cloning_reward(const EnvState& next_state, int t, const Demonstration& demo);

/// Same dynamics as EnergyEnv but rewards cell alignment with a demonstration
/// instead of cost. Diverged episodes keep running and collect zeros while
/// misaligned; a return of `horizon` is earned exactly by the demonstration's
/// cell path.
class CloningEnv : public TrainingEnv {
 public:
  CloningEnv(DayProfile day, ApplianceSpec spec, Normalizer norm, Demonstration demo);

  Eigen::VectorXd reset() override;
  Step step(int action) override;
  const EnvState& raw_state() const override { return state_; }
  int horizon() const override { return day_.hours(); }

  const Demonstration& demonstration() const { return demo_; }

 private:
  DayProfile day_;
  ApplianceSpec spec_;
  Normalizer norm_;
  Demonstration demo_;
  EnvState state_;
  bool started_ = false;
};

/// Timesteps (1..horizon) at which the greedy policy's cells match the
/// demonstration; full alignment equals the horizon.
int greedy_alignment(const PpoAgent& agent, const DayProfile& day, const ApplianceSpec& spec,
                     const Normalizer& norm, const Demonstration& demo);

struct Phase2Result {
  PpoAgent agent;
  TrainReport report;
};

/// Phase 2.1: fresh PPO agent trained on the imitation reward until the greedy
/// policy is fully aligned or the episode budget runs out (warning flag set).
Phase2Result train_clone(const Demonstration& demo, const DayProfile& day,
                         const ApplianceSpec& spec, const Normalizer& norm,
                         const PpoConfig& config, int episode_budget, std::uint64_t seed);

/// Phase 2.2: continues PPO from the cloned policy on the true billed reward
/// for the episode budget, with a fresh value baseline (the cloning returns
/// live on a different scale). Tracks the training-day greedy cost after every
/// update and returns the cheapest iterate, so refinement never regresses on a
/// deterministic day.
Phase2Result robustify(const PpoAgent& cloned, const DayProfile& day, const ApplianceSpec& spec,
                       const Normalizer& norm, const PpoConfig& config, int episode_budget,
                       std::uint64_t seed);

}  // namespace hems
