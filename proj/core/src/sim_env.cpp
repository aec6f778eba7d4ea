#include "hems/sim_env.hpp"

#include <cmath>

#include "hems/errors.hpp"

namespace hems {

namespace {

void check_series(const std::vector<double>& v, std::size_t expected, const char* name,
                  const Date& date) {
  if (v.size() != expected) {
    throw ValidationError(std::string(name) + " series of " + date.to_string() + " has " +
                          std::to_string(v.size()) + " entries, expected " +
                          std::to_string(expected));
  }
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw ValidationError(std::string(name) + " series of " + date.to_string() +
                            " contains a negative or non-finite value");
    }
  }
}

EnvState observe_hour(const DayProfile& day, int hour, int remaining) {
  const int h = std::min(hour, day.hours() - 1);  // terminal carries last-hour values
  EnvState s;
  s.price_obs = day.price[h];
  s.renewable_obs = day.renewable[h];
  s.background_obs = day.background[h];
  s.remaining_task = remaining;
  s.hour = hour;
  return s;
}

}  // namespace

void ApplianceSpec::validate() const {
  if (!(rated_power_kw > 0.0) || !std::isfinite(rated_power_kw)) {
    throw ValidationError("appliance rated power must be positive");
  }
  if (required_hours <= 0 || required_hours > 24) {
    throw ValidationError("appliance required hours must be in 1..24");
  }
}

void DayProfile::validate() const {
  const std::size_t n = price.size();
  if (n < 1 || n > 24) {
    throw ValidationError("day profile of " + date.to_string() + " has " + std::to_string(n) +
                          " hours, expected 1..24");
  }
  check_series(price, n, "price", date);
  check_series(background, n, "background", date);
  check_series(renewable, n, "renewable", date);
}

void DayProfile::validate_full_day() const {
  validate();
  if (hours() != 24) {
    throw ValidationError("day profile of " + date.to_string() + " has " +
                          std::to_string(hours()) + " hours, expected exactly 24");
  }
}

int force_action(const EnvState& state, int requested, int horizon) {
  if (state.hour >= horizon) {
    throw ValidationError("force_action called on a terminal state");
  }
  if (requested != 0 && requested != 1) {
    throw ValidationError("action must be 0 or 1");
  }
  return state.remaining_task >= horizon - state.hour ? 1 : requested;
}

double hourly_reward(double price, double shiftable_kw, double background_kw,
                     double renewable_kw) {
  if (price < 0.0 || shiftable_kw < 0.0 || background_kw < 0.0 || renewable_kw < 0.0) {
    throw ValidationError("hourly_reward inputs must be non-negative");
  }
  const double net_kw = shiftable_kw + background_kw - renewable_kw;
  if (net_kw <= 0.0) {
    return 0.0;
  }
  const double billed = price * net_kw;
  return billed == 0.0 ? 0.0 : -billed;
}

EnvState reset(const DayProfile& day, const ApplianceSpec& spec) {
  day.validate_full_day();
  return reset_episode(day, spec);
}

EnvState reset_episode(const DayProfile& day, const ApplianceSpec& spec) {
  day.validate();
  spec.validate();
  if (spec.required_hours > day.hours()) {
    throw ValidationError("required hours exceed the episode horizon");
  }
  return observe_hour(day, 0, spec.required_hours);
}

StepOutcome step(const EnvState& state, int action, const DayProfile& day,
                 const ApplianceSpec& spec) {
  const int horizon = day.hours();
  if (state.hour >= horizon) {
    throw ValidationError("step called on a terminal state");
  }
  const int forced = force_action(state, action, horizon);
  const double shiftable_kw =
      (forced == 1 && state.remaining_task > 0) ? spec.rated_power_kw : 0.0;
  const int h = state.hour;

  StepOutcome out;
  out.reward = hourly_reward(day.price[h], shiftable_kw, day.background[h], day.renewable[h]);
  out.effective_action = shiftable_kw > 0.0 ? 1 : 0;
  out.next_state = observe_hour(day, h + 1, state.remaining_task - out.effective_action);
  out.done = out.next_state.hour == horizon;
  return out;
}

Simulator::Simulator(ApplianceSpec spec) : spec_(spec) { spec_.validate(); }

void Simulator::register_day(const DayProfile& day) {
  day.validate();
  days_[day.date.to_string()] = day;
}

const DayProfile& Simulator::day(const std::string& ref) const {
  auto it = days_.find(ref);
  if (it == days_.end()) {
    throw ValidationError("unknown day reference '" + ref + "'");
  }
  return it->second;
}

EnvState Simulator::reset(const std::string& day_ref) {
  day(day_ref).validate_full_day();
  return reset_episode(day_ref);
}

EnvState Simulator::reset_episode(const std::string& day_ref) {
  state_ = hems::reset_episode(day(day_ref), spec_);
  active_ = day_ref;
  accrued_cost_ = 0.0;
  return state_;
}

StepOutcome Simulator::step(int action) {
  if (active_.empty()) {
    throw ValidationError("step before reset");
  }
  StepOutcome out = hems::step(state_, action, day(active_), spec_);
  state_ = out.next_state;
  accrued_cost_ += -out.reward;
  return out;
}

Snapshot Simulator::snapshot() const {
  if (active_.empty()) {
    throw ValidationError("snapshot before reset");
  }
  return Snapshot{state_, active_, accrued_cost_};
}

EnvState Simulator::restore(const Snapshot& snap) {
  const DayProfile& d = day(snap.day_ref);  // throws on unknown day
  if (snap.env_state.hour < 0 || snap.env_state.hour > d.hours()) {
    throw ValidationError("snapshot hour out of range for day " + snap.day_ref);
  }
  active_ = snap.day_ref;
  state_ = snap.env_state;
  accrued_cost_ = snap.accrued_cost;
  return state_;
}

int Simulator::horizon() const {
  if (active_.empty()) {
    throw ValidationError("no active day");
  }
  return day(active_).hours();
}

bool Simulator::done() const { return !active_.empty() && state_.hour >= horizon(); }

}  // namespace hems
