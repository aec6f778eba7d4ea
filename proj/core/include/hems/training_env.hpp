#pragma once

#include <span>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "hems/sim_env.hpp"

namespace hems {

inline constexpr int kObservationDim = 5;
inline constexpr int kNumActions = 2;

/// Scales observations into tanh-friendly ranges: price/background/renewable by
/// their training-set maxima, remaining task by the requirement, hour by 24.
struct Normalizer {
  double price_max = 1.0;
  double background_max = 1.0;
  double renewable_max = 1.0;

  static Normalizer fit(std::span<const DayProfile> days);

  /// [price, renewable, background, remaining, hour], each normalized.
  Eigen::VectorXd observe(const EnvState& state, const ApplianceSpec& spec) const;
};

nlohmann::json normalizer_to_json(const Normalizer& n);
Normalizer normalizer_from_json(const nlohmann::json& j);

/// Episodic environment contract shared by the trainers: normalized observation
/// vectors in, scalar reward out. Implementations wrap the simulator.
class TrainingEnv {
 public:
  struct Step {
    Eigen::VectorXd observation;
    double reward = 0.0;
    bool done = false;
    int effective_action = 0;
  };

  virtual ~TrainingEnv() = default;
  virtual Eigen::VectorXd reset() = 0;
  virtual Step step(int action) = 0;
  virtual const EnvState& raw_state() const = 0;
  virtual int observation_dim() const { return kObservationDim; }
  virtual int horizon() const = 0;
};

/// The true-reward environment: each step pays the billed hourly cost (Eq.
/// reward is the negated cost), so an episode return is minus the day's bill.
class EnergyEnv : public TrainingEnv {
 public:
  EnergyEnv(DayProfile day, ApplianceSpec spec, Normalizer norm);

  Eigen::VectorXd reset() override;
  Step step(int action) override;
  const EnvState& raw_state() const override { return state_; }
  int horizon() const override { return day_.hours(); }

  /// Billed cost accrued since reset.
  double episode_cost() const { return cost_; }
  const DayProfile& day() const { return day_; }
  const ApplianceSpec& appliance() const { return spec_; }
  const Normalizer& normalizer() const { return norm_; }

 private:
  DayProfile day_;
  ApplianceSpec spec_;
  Normalizer norm_;
  EnvState state_;
  double cost_ = 0.0;
  bool started_ = false;
};

}  // namespace hems
