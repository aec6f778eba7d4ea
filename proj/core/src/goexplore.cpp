#include "hems/goexplore.hpp"

#include <limits>

#include <nlohmann/json.hpp>

#include "hems/errors.hpp"

namespace hems {

Cell cell_of(const EnvState& state) { return Cell{state.remaining_task, state.hour}; }

void Phase1Config::validate() const {
  if (max_iters < 1 || patience < 1) {
    throw ValidationError("phase 1 iteration limits must be >= 1");
  }
}

Archive init_archive(Simulator& sim, const std::string& day_ref) {
  const EnvState start = sim.reset_episode(day_ref);
  Archive archive;
  archive.horizon = sim.horizon();
  CellEntry entry;
  entry.cell = cell_of(start);
  entry.visits = 1;
  entry.cost_to_reach = 0.0;
  entry.snapshot = sim.snapshot();
  archive.entries.emplace(entry.cell, entry);
  return archive;
}

std::vector<std::pair<Cell, double>> sampling_distribution(const Archive& archive) {
  if (archive.entries.empty()) {
    throw ValidationError("sampling from an empty archive");
  }
  double total = 0.0;
  for (const auto& [cell, entry] : archive.entries) {
    total += 1.0 / static_cast<double>(entry.visits);
  }
  std::vector<std::pair<Cell, double>> dist;
  dist.reserve(archive.entries.size());
  for (const auto& [cell, entry] : archive.entries) {
    dist.emplace_back(cell, (1.0 / static_cast<double>(entry.visits)) / total);
  }
  return dist;
}

std::vector<VisitRecord> explore_from(Simulator& sim, const CellEntry& entry,
                                      std::mt19937_64& rng) {
  sim.restore(entry.snapshot);
  std::vector<VisitRecord> visited;
  if (sim.done()) {
    return visited;
  }
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<int> trajectory = entry.trajectory;
  while (!sim.done()) {
    const StepOutcome out = sim.step(coin(rng));
    trajectory.push_back(out.effective_action);
    visited.push_back(VisitRecord{cell_of(out.next_state), trajectory, sim.accrued_cost(),
                                  sim.snapshot()});
  }
  return visited;
}

bool update_archive(Archive& archive, const std::vector<VisitRecord>& visited) {
  bool terminal_improved = false;
  for (const VisitRecord& record : visited) {
    auto it = archive.entries.find(record.cell);
    if (it == archive.entries.end()) {
      CellEntry entry;
      entry.cell = record.cell;
      entry.trajectory = record.trajectory;
      entry.visits = 1;
      entry.cost_to_reach = record.cost_to_reach;
      entry.snapshot = record.snapshot;
      it = archive.entries.emplace(record.cell, std::move(entry)).first;
    } else {
      it->second.visits += 1;
      if (record.cost_to_reach < it->second.cost_to_reach) {
        it->second.trajectory = record.trajectory;
        it->second.cost_to_reach = record.cost_to_reach;
        it->second.snapshot = record.snapshot;
      }
    }
    if (record.cell.hour == archive.horizon) {
      if (!archive.best_terminal ||
          record.cost_to_reach < archive.best_terminal->cost_to_reach) {
        archive.best_terminal = it->second;
        terminal_improved = true;
      }
    }
  }
  return terminal_improved;
}

Demonstration run_phase1(const DayProfile& day, const ApplianceSpec& spec, std::mt19937_64& rng,
                         const Phase1Config& config, Archive* archive_out) {
  config.validate();
  Simulator sim(spec);
  sim.register_day(day);
  const std::string ref = day.date.to_string();
  Archive archive = init_archive(sim, ref);

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  int stall = 0;
  for (int iter = 0; iter < config.max_iters && stall < config.patience; ++iter) {
    const auto dist = sampling_distribution(archive);
    const double u = uniform(rng);
    double cumulative = 0.0;
    const Cell* chosen = &dist.back().first;
    for (const auto& [cell, p] : dist) {
      cumulative += p;
      if (u < cumulative) {
        chosen = &cell;
        break;
      }
    }
    const auto visited = explore_from(sim, archive.entries.at(*chosen), rng);
    stall = update_archive(archive, visited) ? 0 : stall + 1;
  }

  if (archive_out) {
    *archive_out = archive;
  }
  // forcing guarantees the very first exploration reaches a terminal cell
  return replay_demonstration(day, spec, archive.best_terminal->trajectory);
}

Demonstration replay_demonstration(const DayProfile& day, const ApplianceSpec& spec,
                                   const std::vector<int>& actions) {
  if (static_cast<int>(actions.size()) != day.hours()) {
    throw ValidationError("demonstration has " + std::to_string(actions.size()) +
                          " actions for a " + std::to_string(day.hours()) + "-hour day");
  }
  Demonstration demo;
  demo.day = day.date;
  EnvState state = reset_episode(day, spec);
  demo.states.push_back(state);
  for (int action : actions) {
    const StepOutcome out = step(state, action, day, spec);
    demo.actions.push_back(out.effective_action);
    demo.total_cost += -out.reward;
    state = out.next_state;
    demo.states.push_back(state);
  }
  return demo;
}

nlohmann::json demonstration_to_json(const Demonstration& demo) {
  return nlohmann::json{{"actions", demo.actions},
                        {"total_cost", demo.total_cost},
                        {"day", demo.day.to_string()}};
}

Demonstration demonstration_from_json(const nlohmann::json& j, const DayProfile& day,
                                      const ApplianceSpec& spec) {
  const Date date = Date::parse(j.at("day").get<std::string>());
  if (date != day.date) {
    throw ValidationError("demonstration is for day " + date.to_string() + ", profile is " +
                          day.date.to_string());
  }
  Demonstration demo =
      replay_demonstration(day, spec, j.at("actions").get<std::vector<int>>());
  const double stored_cost = j.at("total_cost").get<double>();
  if (stored_cost != demo.total_cost) {
    throw ValidationError("demonstration cost does not replay: stored " +
                          std::to_string(stored_cost) + ", replayed " +
                          std::to_string(demo.total_cost));
  }
  return demo;
}

nlohmann::json archive_to_json(const Archive& archive) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [cell, entry] : archive.entries) {
    entries.push_back({{"cell", {{"remaining", cell.remaining}, {"hour", cell.hour}}},
                       {"visits", entry.visits},
                       {"cost_to_reach", entry.cost_to_reach},
                       {"trajectory", entry.trajectory}});
  }
  return entries;
}

}  // namespace hems
