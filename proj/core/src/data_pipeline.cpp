#include "hems/data_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hems/errors.hpp"

namespace hems {

void RawSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].value) || points[i].value < 0.0) {
      throw ValidationError("raw series value at index " + std::to_string(i) +
                            " is negative or non-finite");
    }
    if (i > 0 && points[i].timestamp <= points[i - 1].timestamp) {
      throw ValidationError("raw series timestamps not strictly increasing at index " +
                            std::to_string(i));
    }
  }
}

RawSeries read_series_csv(const std::filesystem::path& file, SeriesUnit unit) {
  std::ifstream in(file);
  if (!in) {
    throw ValidationError("cannot open CSV file: " + file.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("empty CSV file: " + file.string());
  }
  // tolerate a UTF-8 BOM and trailing CR
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,value") {
    throw ValidationError("expected header 'timestamp,value' in " + file.string() + ", got '" +
                          line + "'");
  }

  RawSeries series;
  series.unit = unit;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": missing comma");
    }
    RawPoint p;
    p.timestamp = parse_timestamp(std::string_view(line).substr(0, comma));
    const std::string value_str = line.substr(comma + 1);
    std::size_t consumed = 0;
    try {
      p.value = std::stod(value_str, &consumed);
    } catch (const std::exception&) {
      throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": bad value '" +
                            value_str + "'");
    }
    if (consumed != value_str.size()) {
      throw ValidationError(file.string() + ":" + std::to_string(line_no) + ": bad value '" +
                            value_str + "'");
    }
    if (!std::isfinite(p.value) || p.value < 0.0) {
      throw ValidationError(file.string() + ":" + std::to_string(line_no) +
                            ": negative or non-finite value");
    }
    series.points.push_back(p);
  }
  series.validate();  // monotone timestamps
  return series;
}

std::vector<double> resample_hourly(const RawSeries& series, const Date& day) {
  series.validate();
  const std::int64_t start = day_start_epoch(day);
  const std::int64_t end = start + 24 * 3600;

  std::vector<double> sums(24, 0.0);
  std::vector<long> counts(24, 0);
  // points are sorted; find the day's window
  auto lo = std::lower_bound(series.points.begin(), series.points.end(), start,
                             [](const RawPoint& p, std::int64_t t) { return p.timestamp < t; });
  for (auto it = lo; it != series.points.end() && it->timestamp < end; ++it) {
    const int h = static_cast<int>((it->timestamp - start) / 3600);
    sums[h] += it->value;
    counts[h] += 1;
  }

  std::vector<double> hourly(24);
  for (int h = 0; h < 24; ++h) {
    if (counts[h] == 0) {
      throw ValidationError("no data for " + day.to_string() + " hour " + std::to_string(h));
    }
    hourly[h] = sums[h] / static_cast<double>(counts[h]);
  }
  return hourly;
}

std::vector<DayProfile> build_profiles(const RawSeries& price, DayRange price_days,
                                       const RawSeries& background, DayRange background_days,
                                       const RawSeries& renewable, DayRange renewable_days) {
  if (price_days.count < 1) {
    throw ValidationError("day range must contain at least one day");
  }
  if (background_days.count != price_days.count || renewable_days.count != price_days.count) {
    throw ValidationError("range length mismatch across sources: price " +
                          std::to_string(price_days.count) + ", background " +
                          std::to_string(background_days.count) + ", renewable " +
                          std::to_string(renewable_days.count));
  }

  std::vector<DayProfile> profiles;
  profiles.reserve(static_cast<std::size_t>(price_days.count));
  for (int i = 0; i < price_days.count; ++i) {
    DayProfile p;
    p.date = price_days.start.plus_days(i);
    p.price = resample_hourly(price, price_days.start.plus_days(i));
    p.background = resample_hourly(background, background_days.start.plus_days(i));
    p.renewable = resample_hourly(renewable, renewable_days.start.plus_days(i));
    p.validate_full_day();
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::vector<DayProfile> synth_generate(std::uint64_t seed, int days, const Date& start) {
  if (days < 1) {
    throw ValidationError("synth_generate needs days >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 1.0);

  const auto bell = [](double h, double center, double width) {
    const double z = (h - center) / width;
    return std::exp(-0.5 * z * z);
  };

  std::vector<DayProfile> profiles;
  profiles.reserve(static_cast<std::size_t>(days));
  for (int d = 0; d < days; ++d) {
    DayProfile p;
    p.date = start.plus_days(d);
    p.price.resize(24);
    p.background.resize(24);
    p.renewable.resize(24);

    const double price_scale = 1.0 + 0.10 * unit(rng);
    const double ren_scale = 1.0 + 0.12 * unit(rng);
    const double bg_scale = 1.0 + 0.08 * unit(rng);

    for (int h = 0; h < 24; ++h) {
      // Midday price dip sits under the renewable peak so the cheapest schedule
      // is not the forced end-of-day one. The renewable peak stays below the
      // background-plus-appliance load and the marginal running cost keeps a
      // single sharp minimum, so each day's optimal schedule is unique.
      const double price = price_scale * (0.12 + 0.05 * bell(h, 19.0, 2.5) +
                                          0.03 * bell(h, 8.0, 2.0) - 0.06 * bell(h, 13.0, 2.2)) +
                           0.002 * unit(rng);
      const double renewable = ren_scale * 1.0 * bell(h, 13.0, 2.2) + 0.02 * pos(rng);
      const double background = bg_scale * (0.35 + 0.55 * bell(h, 8.0, 1.8) +
                                            0.80 * bell(h, 19.0, 2.6)) +
                                0.03 * unit(rng);
      p.price[h] = std::max(price, 0.0);
      p.renewable[h] = std::max(renewable, 0.0);
      p.background[h] = std::max(background, 0.0);
    }
    p.validate_full_day();
    profiles.push_back(std::move(p));
  }
  return profiles;
}

nlohmann::json profiles_to_json(std::span<const DayProfile> profiles) {
  nlohmann::json arr = nlohmann::json::array();
  for (const DayProfile& p : profiles) {
    arr.push_back({{"date", p.date.to_string()},
                   {"price", p.price},
                   {"background", p.background},
                   {"renewable", p.renewable}});
  }
  return arr;
}

std::vector<DayProfile> profiles_from_json(const nlohmann::json& j) {
  if (!j.is_array()) {
    throw ValidationError("profile bundle must be a JSON array");
  }
  std::vector<DayProfile> profiles;
  profiles.reserve(j.size());
  for (const auto& e : j) {
    DayProfile p;
    p.date = Date::parse(e.at("date").get<std::string>());
    p.price = e.at("price").get<std::vector<double>>();
    p.background = e.at("background").get<std::vector<double>>();
    p.renewable = e.at("renewable").get<std::vector<double>>();
    p.validate_full_day();
    profiles.push_back(std::move(p));
  }
  return profiles;
}

void save_bundle(const std::filesystem::path& file, std::span<const DayProfile> profiles) {
  const std::string text = profiles_to_json(profiles).dump(2) + "\n";
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write bundle: " + file.string());
  }
  out << text;
}

std::vector<DayProfile> load_bundle(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open bundle: " + file.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad JSON in " + file.string() + ": " + e.what());
  }
  return profiles_from_json(j);
}

const DayProfile& find_day(std::span<const DayProfile> profiles, const Date& date) {
  for (const DayProfile& p : profiles) {
    if (p.date == date) return p;
  }
  throw ValidationError("no profile for day " + date.to_string());
}

std::vector<DayProfile> select_range(std::span<const DayProfile> profiles, const Date& from,
                                     const Date& to) {
  if (to < from) {
    throw ValidationError("day range end precedes start");
  }
  std::vector<DayProfile> out;
  for (const DayProfile& p : profiles) {
    if (!(p.date < from) && !(to < p.date)) out.push_back(p);
  }
  if (out.empty()) {
    throw ValidationError("no profiles between " + from.to_string() + " and " + to.to_string());
  }
  std::sort(out.begin(), out.end(),
            [](const DayProfile& a, const DayProfile& b) { return a.date < b.date; });
  return out;
}

}  // namespace hems
