#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hems/sim_env.hpp"

namespace hems {

/// Provably minimum-cost daily schedule. `optimal_cost` is obtained by replaying
/// `optimal_actions` through the simulator, so it matches a rollout bit for bit.
/// `value_table[h][m]` is the minimum cost-to-go from hour h with m hours of the
/// task remaining (+inf where infeasible under forcing); value_table[H][0] == 0.
struct OracleResult {
  double optimal_cost = 0.0;
  std::vector<int> optimal_actions;
  std::vector<std::vector<double>> value_table;
};

/// Backward induction over (hour, remaining). Stage costs call the same
/// hourly_reward code path as the environment; forcing appears as infeasibility
/// of OFF when slack runs out. Cost ties choose action 0 (run later).
OracleResult solve_day(const DayProfile& day, const ApplianceSpec& spec);

/// Exhaustive enumeration of every action sequence, replayed through the
/// simulator. Horizons above 16 hours are rejected. Same tie-break as solve_day.
/// Leaves value_table empty; enumeration is kept independent of the DP.
OracleResult brute_force(const DayProfile& day, const ApplianceSpec& spec);

nlohmann::json oracle_result_to_json(const OracleResult& result, const Date& date);

}  // namespace hems
