#include "hems/report.hpp"

#include <cstdio>
#include <fstream>

#include "hems/errors.hpp"

namespace hems {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write report: " + file.string());
  }
  out << text;
}

}  // namespace

void TrainReport::validate() const {
  const std::size_t n = episode_returns.size();
  auto check = [&](const std::vector<double>& trace, const char* name) {
    if (!trace.empty() && trace.size() != n) {
      throw ValidationError(std::string("report trace '") + name +
                            "' length does not match episode count");
    }
  };
  check(kl, "kl");
  check(entropy, "entropy");
  check(epsilon, "epsilon");
}

void write_policy_report_csv(const std::filesystem::path& file, const TrainReport& report) {
  report.validate();
  const bool tagged = report.phase == "clone" || report.phase == "robustify";
  std::string text = tagged ? "episode,return,kl,entropy,phase\n" : "episode,return,kl,entropy\n";
  for (std::size_t i = 0; i < report.episode_returns.size(); ++i) {
    text += std::to_string(i + 1);
    text += ',' + format_double(report.episode_returns[i]);
    text += ',' + format_double(i < report.kl.size() ? report.kl[i] : 0.0);
    text += ',' + format_double(i < report.entropy.size() ? report.entropy[i] : 0.0);
    if (tagged) {
      text += ',' + report.phase;
    }
    text += '\n';
  }
  write_text(file, text);
}

void write_value_report_csv(const std::filesystem::path& file, const TrainReport& report) {
  report.validate();
  std::string text = "episode,return,epsilon\n";
  for (std::size_t i = 0; i < report.episode_returns.size(); ++i) {
    text += std::to_string(i + 1);
    text += ',' + format_double(report.episode_returns[i]);
    text += ',' + format_double(i < report.epsilon.size() ? report.epsilon[i] : 0.0);
    text += '\n';
  }
  write_text(file, text);
}

}  // namespace hems
