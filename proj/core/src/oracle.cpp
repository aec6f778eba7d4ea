#include "hems/oracle.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "hems/errors.hpp"

namespace hems {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double stage_cost(const DayProfile& day, const ApplianceSpec& spec, int hour, bool on) {
  const double shiftable = on ? spec.rated_power_kw : 0.0;
  return -hourly_reward(day.price[hour], shiftable, day.background[hour], day.renewable[hour]);
}

/// Replays an action sequence from reset; accumulates cost exactly like a rollout.
double replay_cost(const DayProfile& day, const ApplianceSpec& spec,
                   const std::vector<int>& actions, std::vector<int>* effective_out) {
  EnvState state = reset_episode(day, spec);
  double cost = 0.0;
  if (effective_out) effective_out->clear();
  for (int a : actions) {
    StepOutcome out = step(state, a, day, spec);
    cost += -out.reward;
    if (effective_out) effective_out->push_back(out.effective_action);
    state = out.next_state;
  }
  return cost;
}

}  // namespace

OracleResult solve_day(const DayProfile& day, const ApplianceSpec& spec) {
  day.validate();
  spec.validate();
  const int horizon = day.hours();
  const int required = spec.required_hours;
  if (required > horizon) {
    throw ValidationError("required hours exceed the horizon");
  }

  // value[h][m]: min cost-to-go from hour h with m task hours remaining.
  std::vector<std::vector<double>> value(static_cast<std::size_t>(horizon) + 1,
                                         std::vector<double>(static_cast<std::size_t>(required) + 1,
                                                             kInf));
  value[horizon][0] = 0.0;
  for (int h = horizon - 1; h >= 0; --h) {
    const int slack = horizon - h;
    for (int m = 0; m <= required; ++m) {
      if (m > slack) continue;  // unreachable under forcing
      if (m == 0) {
        // task done; appliance stays off (ON would be a power-free no-op anyway)
        value[h][m] = stage_cost(day, spec, h, false) + value[h + 1][0];
        continue;
      }
      const double on_branch = stage_cost(day, spec, h, true) + value[h + 1][m - 1];
      if (m == slack) {
        value[h][m] = on_branch;  // forced: OFF infeasible
      } else {
        const double off_branch = stage_cost(day, spec, h, false) + value[h + 1][m];
        value[h][m] = off_branch <= on_branch ? off_branch : on_branch;
      }
    }
  }

  // Extract the schedule; prefer OFF on exact ties (run later).
  OracleResult result;
  result.optimal_actions.reserve(static_cast<std::size_t>(horizon));
  int m = required;
  for (int h = 0; h < horizon; ++h) {
    const int slack = horizon - h;
    int action = 0;
    if (m > 0) {
      if (m == slack) {
        action = 1;
      } else {
        const double off_branch = stage_cost(day, spec, h, false) + value[h + 1][m];
        const double on_branch = stage_cost(day, spec, h, true) + value[h + 1][m - 1];
        action = off_branch <= on_branch ? 0 : 1;
      }
    }
    result.optimal_actions.push_back(action);
    m -= action;
  }

  result.value_table = std::move(value);
  result.optimal_cost = replay_cost(day, spec, result.optimal_actions, nullptr);
  return result;
}

OracleResult brute_force(const DayProfile& day, const ApplianceSpec& spec) {
  day.validate();
  spec.validate();
  const int horizon = day.hours();
  if (horizon > 16) {
    throw ValidationError("brute_force horizon limited to 16 hours");
  }
  if (spec.required_hours > horizon) {
    throw ValidationError("required hours exceed the horizon");
  }

  double best_cost = kInf;
  std::vector<int> best_effective;
  std::vector<int> requested(static_cast<std::size_t>(horizon));
  std::vector<int> effective;

  // hour 0 in the top bit so masks enumerate action lists in lexicographic order
  const std::uint32_t n_sequences = 1u << horizon;
  for (std::uint32_t mask = 0; mask < n_sequences; ++mask) {
    for (int h = 0; h < horizon; ++h) {
      requested[h] = (mask >> (horizon - 1 - h)) & 1u;
    }
    const double cost = replay_cost(day, spec, requested, &effective);
    if (cost < best_cost || (cost == best_cost && effective < best_effective)) {
      best_cost = cost;
      best_effective = effective;
    }
  }

  OracleResult result;
  result.optimal_cost = best_cost;
  result.optimal_actions = std::move(best_effective);
  // no value_table: enumeration stays independent of the DP path it cross-checks
  return result;
}

nlohmann::json oracle_result_to_json(const OracleResult& result, const Date& date) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : result.value_table) {
    nlohmann::json jrow = nlohmann::json::array();
    for (double v : row) {
      if (std::isfinite(v)) {
        jrow.push_back(v);
      } else {
        jrow.push_back(nullptr);  // infeasible under forcing
      }
    }
    table.push_back(std::move(jrow));
  }
  return nlohmann::json{{"date", date.to_string()},
                        {"optimal_cost", result.optimal_cost},
                        {"optimal_actions", result.optimal_actions},
                        {"value_table", std::move(table)}};
}

}  // namespace hems
