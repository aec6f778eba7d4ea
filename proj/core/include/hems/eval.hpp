#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hems/dates.hpp"
#include "hems/neuralnet.hpp"
#include "hems/training_env.hpp"

namespace hems {

/// Argmax over the net's outputs (policy probabilities or Q-values); ties go to
/// the lowest action index. Works for both policy and Q networks.
int greedy_action(const MlpSpec& spec, const MlpParams& params, const Eigen::VectorXd& obs);

/// Greedy rollout from reset to terminal; returns the effective action list.
std::vector<int> greedy_rollout(const MlpSpec& spec, const MlpParams& params, TrainingEnv& env);

/// Billed cost of one greedy episode on a fresh environment for `day`.
double greedy_day_cost(const MlpSpec& spec, const MlpParams& params, const DayProfile& day,
                       const ApplianceSpec& appliance, const Normalizer& norm);

struct EvalRow {
  Date date;
  double cost = 0.0;
};

/// Per-day greedy evaluation costs; the monthly total is their sum.
struct EvalReport {
  std::vector<EvalRow> rows;

  double total() const;
};

EvalReport evaluate_policy(const MlpSpec& spec, const MlpParams& params, const Normalizer& norm,
                           std::span<const DayProfile> days, const ApplianceSpec& appliance);

/// date,cost with full-precision costs (currency is rounded only in the
/// comparison table).
void write_eval_csv(const std::filesystem::path& file, const EvalReport& report);
EvalReport read_eval_csv(const std::filesystem::path& file);

struct ComparisonRow {
  std::string name;
  double total = 0.0;
  double saving_abs = 0.0;  // vs the DQN total
  double saving_pct = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // DQN first, then PPO, clone, robustified
};

/// Savings vs the DQN baseline total. All four reports must cover the same days.
ComparisonTable make_comparison(const EvalReport& dqn, const EvalReport& ppo,
                                const EvalReport& clone, const EvalReport& robust);

std::string comparison_to_csv(const ComparisonTable& table);
std::string comparison_to_text(const ComparisonTable& table);

/// Self-contained policy file: network, normalizer and appliance.
void save_policy(const std::filesystem::path& file, const MlpSpec& spec, const MlpParams& params,
                 const Normalizer& norm, const ApplianceSpec& appliance);
void load_policy(const std::filesystem::path& file, MlpSpec& spec, MlpParams& params,
                 Normalizer& norm, ApplianceSpec& appliance);

}  // namespace hems
