#include "hems/eval.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hems/errors.hpp"

namespace hems {

namespace {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_money(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

int greedy_action(const MlpSpec& spec, const MlpParams& params, const Eigen::VectorXd& obs) {
  const Eigen::VectorXd out = forward(spec, params, obs);
  Eigen::Index best = 0;
  for (Eigen::Index a = 1; a < out.size(); ++a) {
    if (out(a) > out(best)) best = a;  // strict: ties keep the lowest index
  }
  return static_cast<int>(best);
}

std::vector<int> greedy_rollout(const MlpSpec& spec, const MlpParams& params, TrainingEnv& env) {
  Eigen::VectorXd obs = env.reset();
  std::vector<int> effective;
  effective.reserve(static_cast<std::size_t>(env.horizon()));
  while (true) {
    const auto out = env.step(greedy_action(spec, params, obs));
    effective.push_back(out.effective_action);
    if (out.done) break;
    obs = out.observation;
  }
  return effective;
}

double greedy_day_cost(const MlpSpec& spec, const MlpParams& params, const DayProfile& day,
                       const ApplianceSpec& appliance, const Normalizer& norm) {
  EnergyEnv env(day, appliance, norm);
  greedy_rollout(spec, params, env);
  return env.episode_cost();
}

double EvalReport::total() const {
  double sum = 0.0;
  for (const EvalRow& row : rows) sum += row.cost;
  return sum;
}

EvalReport evaluate_policy(const MlpSpec& spec, const MlpParams& params, const Normalizer& norm,
                           std::span<const DayProfile> days, const ApplianceSpec& appliance) {
  if (days.empty()) {
    throw ValidationError("evaluation needs at least one day");
  }
  EvalReport report;
  report.rows.reserve(days.size());
  for (const DayProfile& day : days) {
    report.rows.push_back(EvalRow{day.date, greedy_day_cost(spec, params, day, appliance, norm)});
  }
  return report;
}

void write_eval_csv(const std::filesystem::path& file, const EvalReport& report) {
  std::string text = "date,cost\n";
  for (const EvalRow& row : report.rows) {
    text += row.date.to_string() + ',' + format_full(row.cost) + '\n';
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write eval CSV: " + file.string());
  }
  out << text;
}

EvalReport read_eval_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open eval CSV: " + file.string());
  }
  std::string line;
  if (!std::getline(in, line) || (line != "date,cost" && line != "date,cost\r")) {
    throw ValidationError("expected header 'date,cost' in " + file.string());
  }
  EvalReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": missing comma");
    }
    EvalRow row;
    row.date = Date::parse(line.substr(0, comma));
    try {
      row.cost = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": bad cost");
    }
    report.rows.push_back(row);
  }
  if (report.rows.empty()) {
    throw ValidationError("eval CSV has no rows: " + file.string());
  }
  return report;
}

ComparisonTable make_comparison(const EvalReport& dqn, const EvalReport& ppo,
                                const EvalReport& clone, const EvalReport& robust) {
  auto same_days = [&](const EvalReport& other, const char* name) {
    if (other.rows.size() != dqn.rows.size()) {
      throw ValidationError(std::string("report '") + name + "' covers a different day count");
    }
    for (std::size_t i = 0; i < dqn.rows.size(); ++i) {
      if (other.rows[i].date != dqn.rows[i].date) {
        throw ValidationError(std::string("report '") + name + "' day " +
                              other.rows[i].date.to_string() + " does not match DQN day " +
                              dqn.rows[i].date.to_string());
      }
    }
  };
  same_days(ppo, "ppo");
  same_days(clone, "clone");
  same_days(robust, "robust");

  const double dqn_total = dqn.total();
  auto row = [&](const std::string& name, double total) {
    ComparisonRow r;
    r.name = name;
    r.total = total;
    r.saving_abs = dqn_total - total;
    r.saving_pct = dqn_total != 0.0 ? 100.0 * r.saving_abs / dqn_total : 0.0;
    return r;
  };
  ComparisonTable table;
  table.rows.push_back(row("dqn", dqn_total));
  table.rows.push_back(row("ppo", ppo.total()));
  table.rows.push_back(row("go_explore_no_robustification", clone.total()));
  table.rows.push_back(row("go_explore_robustification", robust.total()));
  return table;
}

std::string comparison_to_csv(const ComparisonTable& table) {
  std::string text = "algorithm,total_cost,saving_vs_dqn,saving_pct\n";
  for (const ComparisonRow& r : table.rows) {
    text += r.name + ',' + format_money(r.total) + ',' + format_money(r.saving_abs) + ',' +
            format_money(r.saving_pct) + '\n';
  }
  return text;
}

std::string comparison_to_text(const ComparisonTable& table) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-32s %12s %22s\n", "algorithm", "total cost",
                "saving vs DQN");
  out << line;
  for (const ComparisonRow& r : table.rows) {
    std::snprintf(line, sizeof(line), "%-32s %12.2f %14.2f (%.2f%%)\n", r.name.c_str(), r.total,
                  r.saving_abs, r.saving_pct);
    out << line;
  }
  return out.str();
}

void save_policy(const std::filesystem::path& file, const MlpSpec& spec, const MlpParams& params,
                 const Normalizer& norm, const ApplianceSpec& appliance) {
  nlohmann::json j{{"network", mlp_to_json(spec, params)},
                   {"normalizer", normalizer_to_json(norm)},
                   {"appliance",
                    {{"rated_power_kw", appliance.rated_power_kw},
                     {"required_hours", appliance.required_hours}}}};
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write policy: " + file.string());
  }
  out << j.dump(2) << '\n';
}

void load_policy(const std::filesystem::path& file, MlpSpec& spec, MlpParams& params,
                 Normalizer& norm, ApplianceSpec& appliance) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open policy: " + file.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad JSON in " + file.string() + ": " + e.what());
  }
  mlp_from_json(j.at("network"), spec, params);
  norm = normalizer_from_json(j.at("normalizer"));
  appliance.rated_power_kw = j.at("appliance").at("rated_power_kw").get<double>();
  appliance.required_hours = j.at("appliance").at("required_hours").get<int>();
  appliance.validate();
}

}  // namespace hems
