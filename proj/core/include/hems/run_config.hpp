#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <nlohmann/json_fwd.hpp>

#include "hems/dqn.hpp"
#include "hems/goexplore.hpp"
#include "hems/ppo.hpp"
#include "hems/sim_env.hpp"

namespace hems {

struct Phase2Budgets {
  int clone_episodes = 400;      // early-stops at full alignment
  int robustify_episodes = 60;

  void validate() const;
};

/// Everything a run needs, with the published hyperparameters as defaults.
/// JSON configs may override any subset; unknown keys are rejected.
struct RunConfig {
  ApplianceSpec appliance;
  PpoConfig ppo;
  DqnConfig dqn;
  Phase1Config goexplore;
  Phase2Budgets phase2;
  std::optional<std::uint64_t> seed;

  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& file);
nlohmann::json run_config_to_json(const RunConfig& config);

inline constexpr std::uint64_t kDefaultSeed = 1;

/// Precedence: explicit --seed flag, then the config file, then the HEMS_SEED
/// environment variable, then kDefaultSeed.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag_seed,
                           std::optional<std::uint64_t> config_seed);

}  // namespace hems
