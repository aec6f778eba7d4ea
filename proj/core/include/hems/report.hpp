#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hems {

/// Per-episode training diagnostics. kl/entropy (policy-gradient runs) and
/// epsilon (value-based runs) are aligned with episode_returns; unused traces
/// stay empty.
struct TrainReport {
  std::string phase;  // "ppo", "dqn", "clone", "robustify"
  std::vector<double> episode_returns;
  std::vector<double> kl;
  std::vector<double> entropy;
  std::vector<double> epsilon;
  double final_eval_cost = 0.0;
  bool warning = false;  // e.g. cloning budget exhausted before full alignment

  void validate() const;
};

/// episode,return,kl,entropy[,phase] with the phase column present for the
/// phase-2 stages.
void write_policy_report_csv(const std::filesystem::path& file, const TrainReport& report);
/// episode,return,epsilon
void write_value_report_csv(const std::filesystem::path& file, const TrainReport& report);

}  // namespace hems
