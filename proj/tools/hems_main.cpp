// hems: appliance-scheduling experiments on a household energy MDP.
// Subcommands cover the full pipeline: synthetic or CSV data prep, exact DP
// solutions, archive-based exploration + policy cloning + robustification,
// PPO/DQN baselines, greedy evaluation over a date range, and the comparison
// table against the DQN baseline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include "hems/data_pipeline.hpp"
#include "hems/dqn.hpp"
#include "hems/errors.hpp"
#include "hems/eval.hpp"
#include "hems/goexplore.hpp"
#include "hems/oracle.hpp"
#include "hems/phase2.hpp"
#include "hems/ppo.hpp"
#include "hems/rng.hpp"
#include "hems/run_config.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hems;

// stable per-stage RNG streams derived from the master seed
enum SeedStream : std::uint64_t {
  kSeedPhase1 = 0,
  kSeedClone = 1,
  kSeedRobustify = 2,
  kSeedPpo = 3,
  kSeedDqn = 4,
  kSeedGenData = 5,
};

struct TrainArgs {
  std::string data;
  std::string train_day;
  std::string config_file;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool dump_archive = false;
};

RunConfig load_config_or_default(const std::string& file) {
  if (file.empty()) {
    return RunConfig{};
  }
  return load_run_config(file);
}

void write_json(const fs::path& file, const nlohmann::json& j) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write " + file.string());
  }
  out << j.dump(2) << '\n';
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ValidationError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

int cmd_gen_data(std::optional<std::uint64_t> seed_flag, int days, const std::string& start,
                 const std::string& out) {
  const std::uint64_t seed = resolve_seed(seed_flag, std::nullopt);
  const auto profiles = synth_generate(subseed(seed, kSeedGenData), days, Date::parse(start));
  save_bundle(out, profiles);
  std::cout << "wrote " << profiles.size() << " day(s) to " << out << "\n";
  return 0;
}

int cmd_ingest(const std::string& price_file, const std::string& background_file,
               const std::string& renewable_file, const std::string& train_start, int train_days,
               const std::string& eval_start, int eval_days, const std::string& out) {
  const RawSeries price = read_series_csv(price_file, SeriesUnit::kCurrencyPerKwh);
  const RawSeries background = read_series_csv(background_file, SeriesUnit::kKw);
  const RawSeries renewable = read_series_csv(renewable_file, SeriesUnit::kKw);

  DatasetSplit split;
  split.train_days = build_profiles(price, {Date::parse(train_start), train_days},
                                    background, {Date::parse(train_start), train_days},
                                    renewable, {Date::parse(train_start), train_days});
  split.eval_days = build_profiles(price, {Date::parse(eval_start), eval_days},
                                   background, {Date::parse(eval_start), eval_days},
                                   renewable, {Date::parse(eval_start), eval_days});

  // one bundle covering both roles, deduplicated by date
  std::vector<DayProfile> all = split.train_days;
  for (const DayProfile& p : split.eval_days) {
    bool seen = false;
    for (const DayProfile& q : all) {
      if (q.date == p.date) {
        seen = true;
        break;
      }
    }
    if (!seen) all.push_back(p);
  }
  std::sort(all.begin(), all.end(),
            [](const DayProfile& a, const DayProfile& b) { return a.date < b.date; });
  save_bundle(out, all);
  std::cout << "wrote " << all.size() << " day(s) to " << out << "\n";
  return 0;
}

int cmd_oracle(const std::string& data, const std::string& day, const std::string& from,
               const std::string& to, const std::string& out) {
  const auto profiles = load_bundle(data);
  std::vector<DayProfile> days;
  if (!day.empty()) {
    days.push_back(find_day(profiles, Date::parse(day)));
  } else if (!from.empty() && !to.empty()) {
    days = select_range(profiles, Date::parse(from), Date::parse(to));
  } else {
    days = profiles;
  }

  ApplianceSpec spec;  // oracle runs on the stock appliance unless a config says otherwise
  nlohmann::json results = nlohmann::json::array();
  for (const DayProfile& d : days) {
    results.push_back(oracle_result_to_json(solve_day(d, spec), d.date));
  }
  if (out.empty()) {
    std::cout << results.dump(2) << "\n";
  } else {
    write_json(out, results);
    std::cout << "wrote " << results.size() << " oracle result(s) to " << out << "\n";
  }
  return 0;
}

int cmd_train_go_explore(const TrainArgs& args) {
  const RunConfig config = load_config_or_default(args.config_file);
  const std::uint64_t seed = resolve_seed(args.seed, config.seed);
  const auto profiles = load_bundle(args.data);
  const DayProfile& day = find_day(profiles, Date::parse(args.train_day));
  const Normalizer norm = Normalizer::fit(std::span(&day, 1));

  std::mt19937_64 phase1_rng(subseed(seed, kSeedPhase1));
  Archive archive;
  const Demonstration demo = run_phase1(day, config.appliance, phase1_rng, config.goexplore,
                                        args.dump_archive ? &archive : nullptr);
  std::cout << "phase 1: demonstration cost " << demo.total_cost << "\n";

  const Phase2Result clone = train_clone(demo, day, config.appliance, norm, config.ppo,
                                         config.phase2.clone_episodes, subseed(seed, kSeedClone));
  std::cout << "phase 2.1: cloning cost " << clone.report.final_eval_cost
            << (clone.report.warning ? " (warning: budget exhausted before full alignment)" : "")
            << "\n";

  const Phase2Result robust =
      robustify(clone.agent, day, config.appliance, norm, config.ppo,
                config.phase2.robustify_episodes, subseed(seed, kSeedRobustify));
  std::cout << "phase 2.2: robustified cost " << robust.report.final_eval_cost << "\n";

  ensure_out_dir(args.out_dir);
  const fs::path dir(args.out_dir);
  write_json(dir / "demo.json", demonstration_to_json(demo));
  save_policy(dir / "clone.policy.json", clone.agent.policy_spec, clone.agent.policy, norm,
              config.appliance);
  save_policy(dir / "robust.policy.json", robust.agent.policy_spec, robust.agent.policy, norm,
              config.appliance);
  write_policy_report_csv(dir / "clone.report.csv", clone.report);
  write_policy_report_csv(dir / "robustify.report.csv", robust.report);
  if (args.dump_archive) {
    write_json(dir / "archive.json", archive_to_json(archive));
  }
  return 0;
}

int cmd_train_ppo(const TrainArgs& args) {
  const RunConfig config = load_config_or_default(args.config_file);
  const std::uint64_t seed = resolve_seed(args.seed, config.seed);
  const auto profiles = load_bundle(args.data);
  const DayProfile& day = find_day(profiles, Date::parse(args.train_day));
  const Normalizer norm = Normalizer::fit(std::span(&day, 1));

  EnergyEnv env(day, config.appliance, norm);
  const PpoTrainResult result = train_ppo(env, config.ppo, subseed(seed, kSeedPpo));
  std::cout << "ppo: training-day greedy cost " << result.report.final_eval_cost << "\n";

  ensure_out_dir(args.out_dir);
  const fs::path dir(args.out_dir);
  save_policy(dir / "ppo.policy.json", result.agent.policy_spec, result.agent.policy, norm,
              config.appliance);
  write_policy_report_csv(dir / "ppo.report.csv", result.report);
  return 0;
}

int cmd_train_dqn(const TrainArgs& args) {
  const RunConfig config = load_config_or_default(args.config_file);
  const std::uint64_t seed = resolve_seed(args.seed, config.seed);
  const auto profiles = load_bundle(args.data);
  const DayProfile& day = find_day(profiles, Date::parse(args.train_day));
  const Normalizer norm = Normalizer::fit(std::span(&day, 1));

  EnergyEnv env(day, config.appliance, norm);
  const DqnTrainResult result = train_dqn(env, config.dqn, subseed(seed, kSeedDqn));
  std::cout << "dqn: training-day greedy cost " << result.report.final_eval_cost << "\n";

  ensure_out_dir(args.out_dir);
  const fs::path dir(args.out_dir);
  save_policy(dir / "dqn.policy.json", result.spec, result.q_net, norm, config.appliance);
  write_value_report_csv(dir / "dqn.report.csv", result.report);
  return 0;
}

int cmd_evaluate(const std::string& policy_file, const std::string& data, const std::string& from,
                 const std::string& to, const std::string& exclude, const std::string& out) {
  MlpSpec spec;
  MlpParams params;
  Normalizer norm;
  ApplianceSpec appliance;
  load_policy(policy_file, spec, params, norm, appliance);

  const auto profiles = load_bundle(data);
  std::vector<DayProfile> days = select_range(profiles, Date::parse(from), Date::parse(to));
  if (!exclude.empty()) {
    const Date skip = Date::parse(exclude);
    std::erase_if(days, [&](const DayProfile& p) { return p.date == skip; });
    if (days.empty()) {
      throw ValidationError("excluding " + exclude + " leaves no evaluation days");
    }
  }

  const EvalReport report = evaluate_policy(spec, params, norm, days, appliance);
  write_eval_csv(out, report);
  char total[40];
  std::snprintf(total, sizeof(total), "%.2f", report.total());
  std::cout << "evaluated " << report.rows.size() << " day(s), total cost " << total << ", wrote "
            << out << "\n";
  return 0;
}

int cmd_report(const std::string& dqn_csv, const std::string& ppo_csv,
               const std::string& clone_csv, const std::string& robust_csv,
               const std::string& out) {
  const ComparisonTable table =
      make_comparison(read_eval_csv(dqn_csv), read_eval_csv(ppo_csv), read_eval_csv(clone_csv),
                      read_eval_csv(robust_csv));
  const std::string csv = comparison_to_csv(table);
  std::ofstream file(out, std::ios::binary);
  if (!file) {
    throw ValidationError("cannot write " + out);
  }
  file << csv;
  std::cout << comparison_to_text(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"household appliance scheduling: exploration, baselines, exact oracle"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a seeded synthetic profile bundle");
  std::optional<std::uint64_t> gen_seed;
  int gen_days = 30;
  std::string gen_start = "2021-05-01";
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "master seed (falls back to HEMS_SEED)");
  gen->add_option("--days", gen_days, "number of days")->required();
  gen->add_option("--start-date", gen_start, "date of the first day");
  gen->add_option("--out", gen_out, "output bundle JSON")->required();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "build a profile bundle from CSV feeds");
  std::string in_price, in_background, in_renewable, in_train_start, in_eval_start, in_out;
  int in_train_days = 1, in_eval_days = 30;
  ingest->add_option("--price", in_price, "price CSV (timestamp,value)")->required();
  ingest->add_option("--background", in_background, "background load CSV")->required();
  ingest->add_option("--renewable", in_renewable, "renewable generation CSV")->required();
  ingest->add_option("--train-start", in_train_start, "first training day")->required();
  ingest->add_option("--train-days", in_train_days, "number of training days");
  ingest->add_option("--eval-start", in_eval_start, "first evaluation day")->required();
  ingest->add_option("--eval-days", in_eval_days, "number of evaluation days");
  ingest->add_option("--out", in_out, "output bundle JSON")->required();

  // oracle
  auto* orc = app.add_subcommand("oracle", "exact minimum-cost schedules per day");
  std::string orc_data, orc_day, orc_from, orc_to, orc_out;
  orc->add_option("--data", orc_data, "profile bundle JSON")->required();
  orc->add_option("--day", orc_day, "single day");
  orc->add_option("--from", orc_from, "range start");
  orc->add_option("--to", orc_to, "range end");
  orc->add_option("--out", orc_out, "output JSON (stdout if omitted)");

  // train with one sub-subcommand per algorithm
  auto* train = app.add_subcommand("train", "train an agent on one day");
  train->require_subcommand(1);
  TrainArgs targs;
  auto add_train_options = [&](CLI::App* sub) {
    sub->add_option("--data", targs.data, "profile bundle JSON")->required();
    sub->add_option("--train-day", targs.train_day, "training day date")->required();
    sub->add_option("--config", targs.config_file, "run config JSON");
    sub->add_option("--seed", targs.seed, "master seed (overrides config and HEMS_SEED)");
    sub->add_option("--out-dir", targs.out_dir, "output directory")->required();
  };
  auto* tge = train->add_subcommand("go-explore", "phase 1 + cloning + robustification");
  add_train_options(tge);
  tge->add_flag("--dump-archive", targs.dump_archive, "also write the phase 1 archive");
  auto* tppo = train->add_subcommand("ppo", "PPO baseline");
  add_train_options(tppo);
  auto* tdqn = train->add_subcommand("dqn", "DQN baseline");
  add_train_options(tdqn);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "greedy per-day costs over a date range");
  std::string ev_policy, ev_data, ev_from, ev_to, ev_exclude, ev_out;
  ev->add_option("--policy", ev_policy, "policy JSON")->required();
  ev->add_option("--data", ev_data, "profile bundle JSON")->required();
  ev->add_option("--from", ev_from, "range start")->required();
  ev->add_option("--to", ev_to, "range end")->required();
  ev->add_option("--exclude-train-day", ev_exclude, "drop this date from the range");
  ev->add_option("--out", ev_out, "output CSV")->required();

  // report
  auto* rep = app.add_subcommand("report", "comparison table vs the DQN baseline");
  std::string rep_dqn, rep_ppo, rep_clone, rep_robust, rep_out;
  rep->add_option("--dqn", rep_dqn, "DQN eval CSV")->required();
  rep->add_option("--ppo", rep_ppo, "PPO eval CSV")->required();
  rep->add_option("--clone", rep_clone, "no-robustification eval CSV")->required();
  rep->add_option("--robust", rep_robust, "robustified eval CSV")->required();
  rep->add_option("--out", rep_out, "output table CSV")->required();

  try {
    app.parse(argc, argv);

    if (gen->parsed()) return cmd_gen_data(gen_seed, gen_days, gen_start, gen_out);
    if (ingest->parsed()) {
      return cmd_ingest(in_price, in_background, in_renewable, in_train_start, in_train_days,
                        in_eval_start, in_eval_days, in_out);
    }
    if (orc->parsed()) return cmd_oracle(orc_data, orc_day, orc_from, orc_to, orc_out);
    if (train->parsed()) {
      if (tge->parsed()) return cmd_train_go_explore(targs);
      if (tppo->parsed()) return cmd_train_ppo(targs);
      if (tdqn->parsed()) return cmd_train_dqn(targs);
    }
    if (ev->parsed()) return cmd_evaluate(ev_policy, ev_data, ev_from, ev_to, ev_exclude, ev_out);
    if (rep->parsed()) return cmd_report(rep_dqn, rep_ppo, rep_clone, rep_robust, rep_out);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are validation failures
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
