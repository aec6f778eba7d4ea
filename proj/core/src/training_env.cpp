#include "hems/training_env.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "hems/errors.hpp"

namespace hems {

Normalizer Normalizer::fit(std::span<const DayProfile> days) {
  if (days.empty()) {
    throw ValidationError("cannot fit a normalizer on zero days");
  }
  Normalizer n{0.0, 0.0, 0.0};
  for (const DayProfile& d : days) {
    d.validate();
    n.price_max = std::max(n.price_max, *std::max_element(d.price.begin(), d.price.end()));
    n.background_max =
        std::max(n.background_max, *std::max_element(d.background.begin(), d.background.end()));
    n.renewable_max =
        std::max(n.renewable_max, *std::max_element(d.renewable.begin(), d.renewable.end()));
  }
  // all-zero series normalize to zero; keep the divisor harmless
  if (n.price_max <= 0.0) n.price_max = 1.0;
  if (n.background_max <= 0.0) n.background_max = 1.0;
  if (n.renewable_max <= 0.0) n.renewable_max = 1.0;
  return n;
}

Eigen::VectorXd Normalizer::observe(const EnvState& state, const ApplianceSpec& spec) const {
  Eigen::VectorXd obs(kObservationDim);
  obs << state.price_obs / price_max, state.renewable_obs / renewable_max,
      state.background_obs / background_max,
      static_cast<double>(state.remaining_task) / static_cast<double>(spec.required_hours),
      static_cast<double>(state.hour) / 24.0;
  return obs;
}

nlohmann::json normalizer_to_json(const Normalizer& n) {
  return nlohmann::json{{"price_max", n.price_max},
                        {"background_max", n.background_max},
                        {"renewable_max", n.renewable_max}};
}

Normalizer normalizer_from_json(const nlohmann::json& j) {
  Normalizer n;
  n.price_max = j.at("price_max").get<double>();
  n.background_max = j.at("background_max").get<double>();
  n.renewable_max = j.at("renewable_max").get<double>();
  if (!(n.price_max > 0.0) || !(n.background_max > 0.0) || !(n.renewable_max > 0.0)) {
    throw ValidationError("normalizer maxima must be positive");
  }
  return n;
}

EnergyEnv::EnergyEnv(DayProfile day, ApplianceSpec spec, Normalizer norm)
    : day_(std::move(day)), spec_(spec), norm_(norm) {
  day_.validate();
  spec_.validate();
}

Eigen::VectorXd EnergyEnv::reset() {
  state_ = reset_episode(day_, spec_);
  cost_ = 0.0;
  started_ = true;
  return norm_.observe(state_, spec_);
}

TrainingEnv::Step EnergyEnv::step(int action) {
  if (!started_) {
    throw ValidationError("step before reset");
  }
  const StepOutcome out = hems::step(state_, action, day_, spec_);
  state_ = out.next_state;
  cost_ += -out.reward;
  return Step{norm_.observe(state_, spec_), out.reward, out.done, out.effective_action};
}

}  // namespace hems
