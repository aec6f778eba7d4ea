#pragma once

#include <compare>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hems/sim_env.hpp"

namespace hems {

/// Archive key: a coarse grouping of states. Observations are deliberately not
/// part of the key, so the whole space is at most (required_hours+1) x 25 cells.
struct Cell {
  int remaining = 0;
  int hour = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

Cell cell_of(const EnvState& state);

/// Best known way to reach a cell. The trajectory holds effective actions from
/// episode start; replaying it lands exactly in `cell` at exactly
/// `cost_to_reach` billed cost, and `snapshot` restores that entry point.
struct CellEntry {
  Cell cell;
  std::vector<int> trajectory;
  long visits = 1;
  double cost_to_reach = 0.0;
  Snapshot snapshot;
};

struct Archive {
  std::map<Cell, CellEntry> entries;
  std::optional<CellEntry> best_terminal;  // cheapest full episode found so far
  int horizon = 24;
};

/// Cell reached during one exploration rollout, with the full action prefix
/// from episode start and the billed cost at entry.
struct VisitRecord {
  Cell cell;
  std::vector<int> trajectory;
  double cost_to_reach = 0.0;
  Snapshot snapshot;
};

/// Archive seeded with the reset cell of `day_ref`.
Archive init_archive(Simulator& sim, const std::string& day_ref);

/// Selection weights: score 1/visits, normalized into a distribution.
/// Deterministic cell order (map order); probabilities sum to 1.
std::vector<std::pair<Cell, double>> sampling_distribution(const Archive& archive);

/// Restores the entry's snapshot and rolls uniform-random actions to episode
/// end, recording every cell entered. A terminal entry yields an empty list.
std::vector<VisitRecord> explore_from(Simulator& sim, const CellEntry& entry,
                                      std::mt19937_64& rng);

/// Inserts new cells (visits = 1), bumps visit counts, and swaps in strictly
/// cheaper trajectories (ties keep the incumbent). Returns true when the best
/// terminal cost improved.
bool update_archive(Archive& archive, const std::vector<VisitRecord>& visited);

struct Phase1Config {
  int max_iters = 20000;
  int patience = 500;  // stop after this many iterations without improvement

  void validate() const;
};

/// Best full-day trajectory found by Phase 1; the imitation target for Phase 2.
/// states has horizon+1 entries; replaying `actions` reproduces both `states`
/// and `total_cost` exactly.
struct Demonstration {
  std::vector<int> actions;
  std::vector<EnvState> states;
  double total_cost = 0.0;
  Date day;
};

/// Explore until converged: sample a cell by reciprocal visit count, explore
/// from it, update the archive; stop once the best terminal cost has not
/// improved for `patience` iterations (or at max_iters). Returns the
/// demonstration rebuilt by replaying the best terminal trajectory. The final
/// archive is copied to `archive_out` when given (diagnostics).
Demonstration run_phase1(const DayProfile& day, const ApplianceSpec& spec, std::mt19937_64& rng,
                         const Phase1Config& config = {}, Archive* archive_out = nullptr);

/// Replays an action list from reset and packages the result.
Demonstration replay_demonstration(const DayProfile& day, const ApplianceSpec& spec,
                                   const std::vector<int>& actions);

nlohmann::json demonstration_to_json(const Demonstration& demo);
/// Rebuilds states by replay and verifies the stored total cost matches exactly.
Demonstration demonstration_from_json(const nlohmann::json& j, const DayProfile& day,
                                      const ApplianceSpec& spec);

/// Diagnostic dump of every archive entry.
nlohmann::json archive_to_json(const Archive& archive);

}  // namespace hems
