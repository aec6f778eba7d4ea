#pragma once

#include <map>
#include <string>
#include <vector>

#include "hems/dates.hpp"

namespace hems {

/// One shiftable appliance: runs at rated power whenever it is on and must
/// accumulate `required_hours` operating hours per day.
struct ApplianceSpec {
  double rated_power_kw = 1.0;
  int required_hours = 2;

  void validate() const;
};

/// Hourly exogenous inputs for one calendar day: grid price, background load
/// (non-shiftable plus controllable, treated as given) and renewable generation.
/// A full day has exactly 24 entries per series; the exact solvers also accept
/// truncated horizons (see `reset_episode`).
struct DayProfile {
  Date date;
  std::vector<double> price;       // currency/kWh
  std::vector<double> background;  // kW
  std::vector<double> renewable;   // kW

  int hours() const { return static_cast<int>(price.size()); }
  /// Series of equal length 1..24, all values finite and >= 0.
  void validate() const;
  /// Additionally requires exactly 24 entries per series.
  void validate_full_day() const;
};

/// Agent-visible state. Observations are the hourly averages of the decision
/// hour; billing uses the same values, so observation and reward never disagree.
struct EnvState {
  double price_obs = 0.0;
  double renewable_obs = 0.0;
  double background_obs = 0.0;
  int remaining_task = 0;  // operating hours still owed
  int hour = 0;            // 0..horizon; horizon means terminal

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct StepOutcome {
  EnvState next_state;
  double reward = 0.0;      // always <= 0 (negated billed cost)
  bool done = false;
  int effective_action = 0; // 1 iff the appliance actually drew power this hour
};

/// Restorable point of a simulation. Restoring and replaying a fixed action
/// sequence is bit-identical to the uninterrupted run.
struct Snapshot {
  EnvState env_state;
  std::string day_ref;      // date key of the active DayProfile
  double accrued_cost = 0.0;
};

/// Forced completion: any unmet hours must run in the final hours of the day.
/// Returns 1 when no slack is left (remaining == horizon - hour), otherwise the
/// requested action unchanged. Throws on terminal states.
int force_action(const EnvState& state, int requested, int horizon = 24);

/// Billed cost of one hour, negated: -price * max(shiftable + background - renewable, 0).
/// Returns exactly 0.0 when renewable covers the load or price is zero.
double hourly_reward(double price, double shiftable_kw, double background_kw,
                     double renewable_kw);

/// Start-of-day state for a full 24-hour profile.
EnvState reset(const DayProfile& day, const ApplianceSpec& spec);

/// Same as `reset` but accepts truncated profiles (1..24 hours). Used by the
/// exact solvers for small cross-check instances.
EnvState reset_episode(const DayProfile& day, const ApplianceSpec& spec);

/// Pure transition function. Applies forcing, bills the current hour, advances
/// the observations. The terminal state carries the last hour's observations.
StepOutcome step(const EnvState& state, int action, const DayProfile& day,
                 const ApplianceSpec& spec);

/// Stateful convenience wrapper: keeps a registry of day profiles, the active
/// episode state and the accrued billed cost, and supports snapshot/restore.
/// Not meant to be shared across threads; clone snapshots instead.
class Simulator {
 public:
  explicit Simulator(ApplianceSpec spec);

  void register_day(const DayProfile& day);
  bool has_day(const std::string& ref) const { return days_.count(ref) != 0; }
  const DayProfile& day(const std::string& ref) const;

  EnvState reset(const std::string& day_ref);          // full 24-hour day
  EnvState reset_episode(const std::string& day_ref);  // truncated allowed
  StepOutcome step(int action);

  Snapshot snapshot() const;
  EnvState restore(const Snapshot& snap);

  const ApplianceSpec& appliance() const { return spec_; }
  const EnvState& state() const { return state_; }
  const std::string& active_day() const { return active_; }
  int horizon() const;
  bool done() const;
  /// Total billed cost since reset (>= 0); equals minus the sum of rewards.
  double accrued_cost() const { return accrued_cost_; }

 private:
  ApplianceSpec spec_;
  std::map<std::string, DayProfile> days_;
  std::string active_;
  EnvState state_;
  double accrued_cost_ = 0.0;
};

}  // namespace hems
