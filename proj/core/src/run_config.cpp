#include "hems/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <string>

#include <nlohmann/json.hpp>

#include "hems/errors.hpp"

namespace hems {

namespace {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                         const std::string& scope) {
  if (!j.is_object()) {
    throw ValidationError("config section '" + scope + "' must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (const char* k : known) {
      if (key == k) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw ValidationError("unknown config key '" + scope + key + "'");
    }
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) {
    out = j.at(key).get<T>();
  }
}

}  // namespace

void Phase2Budgets::validate() const {
  if (clone_episodes < 0 || robustify_episodes < 0) {
    throw ValidationError("phase 2 episode budgets must be >= 0");
  }
}

void RunConfig::validate() const {
  appliance.validate();
  ppo.validate();
  dqn.validate();
  goexplore.validate();
  phase2.validate();
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"appliance", "ppo", "dqn", "goexplore", "phase2", "seed"}, "");
  RunConfig config;

  if (j.contains("appliance")) {
    const auto& a = j.at("appliance");
    reject_unknown_keys(a, {"rated_power_kw", "required_hours"}, "appliance.");
    read(a, "rated_power_kw", config.appliance.rated_power_kw);
    read(a, "required_hours", config.appliance.required_hours);
  }
  if (j.contains("ppo")) {
    const auto& p = j.at("ppo");
    reject_unknown_keys(p,
                        {"episodes", "learning_rate", "discount", "batch_size", "kl_target",
                         "entropy_weight", "epochs_per_batch", "value_epochs_per_batch", "hidden",
                         "initial_beta"},
                        "ppo.");
    read(p, "episodes", config.ppo.episodes);
    read(p, "learning_rate", config.ppo.learning_rate);
    read(p, "discount", config.ppo.discount);
    read(p, "batch_size", config.ppo.batch_size);
    read(p, "kl_target", config.ppo.kl_target);
    read(p, "entropy_weight", config.ppo.entropy_weight);
    read(p, "epochs_per_batch", config.ppo.epochs_per_batch);
    read(p, "value_epochs_per_batch", config.ppo.value_epochs_per_batch);
    read(p, "hidden", config.ppo.hidden);
    read(p, "initial_beta", config.ppo.initial_beta);
  }
  if (j.contains("dqn")) {
    const auto& d = j.at("dqn");
    reject_unknown_keys(d,
                        {"episodes", "learning_rate", "discount", "batch_size", "hidden",
                         "replay_capacity", "target_sync_interval", "epsilon"},
                        "dqn.");
    read(d, "episodes", config.dqn.episodes);
    read(d, "learning_rate", config.dqn.learning_rate);
    read(d, "discount", config.dqn.discount);
    read(d, "batch_size", config.dqn.batch_size);
    read(d, "hidden", config.dqn.hidden);
    read(d, "replay_capacity", config.dqn.replay_capacity);
    read(d, "target_sync_interval", config.dqn.target_sync_interval);
    if (d.contains("epsilon")) {
      const auto& e = d.at("epsilon");
      reject_unknown_keys(e, {"start", "end", "decay_fraction"}, "dqn.epsilon.");
      read(e, "start", config.dqn.epsilon.start);
      read(e, "end", config.dqn.epsilon.end);
      read(e, "decay_fraction", config.dqn.epsilon.decay_fraction);
    }
  }
  if (j.contains("goexplore")) {
    const auto& g = j.at("goexplore");
    reject_unknown_keys(g, {"max_iters", "patience"}, "goexplore.");
    read(g, "max_iters", config.goexplore.max_iters);
    read(g, "patience", config.goexplore.patience);
  }
  if (j.contains("phase2")) {
    const auto& p = j.at("phase2");
    reject_unknown_keys(p, {"clone_episodes", "robustify_episodes"}, "phase2.");
    read(p, "clone_episodes", config.phase2.clone_episodes);
    read(p, "robustify_episodes", config.phase2.robustify_episodes);
  }
  if (j.contains("seed")) {
    config.seed = j.at("seed").get<std::uint64_t>();
  }

  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open config: " + file.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad JSON in " + file.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

nlohmann::json run_config_to_json(const RunConfig& config) {
  nlohmann::json j{
      {"appliance",
       {{"rated_power_kw", config.appliance.rated_power_kw},
        {"required_hours", config.appliance.required_hours}}},
      {"ppo",
       {{"episodes", config.ppo.episodes},
        {"learning_rate", config.ppo.learning_rate},
        {"discount", config.ppo.discount},
        {"batch_size", config.ppo.batch_size},
        {"kl_target", config.ppo.kl_target},
        {"entropy_weight", config.ppo.entropy_weight},
        {"epochs_per_batch", config.ppo.epochs_per_batch},
        {"value_epochs_per_batch", config.ppo.value_epochs_per_batch},
        {"hidden", config.ppo.hidden},
        {"initial_beta", config.ppo.initial_beta}}},
      {"dqn",
       {{"episodes", config.dqn.episodes},
        {"learning_rate", config.dqn.learning_rate},
        {"discount", config.dqn.discount},
        {"batch_size", config.dqn.batch_size},
        {"hidden", config.dqn.hidden},
        {"replay_capacity", config.dqn.replay_capacity},
        {"target_sync_interval", config.dqn.target_sync_interval},
        {"epsilon",
         {{"start", config.dqn.epsilon.start},
          {"end", config.dqn.epsilon.end},
          {"decay_fraction", config.dqn.epsilon.decay_fraction}}}}},
      {"goexplore",
       {{"max_iters", config.goexplore.max_iters}, {"patience", config.goexplore.patience}}},
      {"phase2",
       {{"clone_episodes", config.phase2.clone_episodes},
        {"robustify_episodes", config.phase2.robustify_episodes}}}};
  if (config.seed) {
    j["seed"] = *config.seed;
  }
  return j;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag_seed,
                           std::optional<std::uint64_t> config_seed) {
  if (flag_seed) return *flag_seed;
  if (config_seed) return *config_seed;
  if (const char* env = std::getenv("HEMS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError(std::string("HEMS_SEED is not an integer: '") + env + "'");
    }
  }
  return kDefaultSeed;
}

}  // namespace hems
