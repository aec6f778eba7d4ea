#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hems/dates.hpp"
#include "hems/sim_env.hpp"

namespace hems {

enum class SeriesUnit { kCurrencyPerKwh, kKw };

struct RawPoint {
  std::int64_t timestamp = 0;  // epoch seconds, naive local time
  double value = 0.0;
};

/// A raw metered feed. Timestamps strictly increasing, values non-negative.
struct RawSeries {
  std::vector<RawPoint> points;
  SeriesUnit unit = SeriesUnit::kKw;

  void validate() const;
};

/// Reads the canonical CSV shape: header `timestamp,value`, ISO-8601 timestamps,
/// decimal point values. Negative values are rejected, not clamped.
RawSeries read_series_csv(const std::filesystem::path& file, SeriesUnit unit);

/// Mean of all points whose timestamps fall inside each of the 24 hour buckets
/// of `day`. An hour without any point is an error naming the hour.
std::vector<double> resample_hourly(const RawSeries& series, const Date& day);

struct DayRange {
  Date start;
  int count = 0;
};

/// Resamples each source over its own day range and zips day i of each source
/// into profile i. Ranges may start on different dates (price feeds and load
/// feeds often come from different years); counts must match. The profile is
/// labeled with the price-range date.
std::vector<DayProfile> build_profiles(const RawSeries& price, DayRange price_days,
                                       const RawSeries& background, DayRange background_days,
                                       const RawSeries& renewable, DayRange renewable_days);

/// Seeded synthetic days: price follows a diurnal curve with a distinct midday
/// minimum co-located with the renewable peak, background has morning/evening
/// peaks. Deterministic in `seed`; all values >= 0.
std::vector<DayProfile> synth_generate(std::uint64_t seed, int days,
                                       const Date& start = Date{2021, 5, 1});

struct DatasetSplit {
  std::vector<DayProfile> train_days;
  std::vector<DayProfile> eval_days;  // may overlap train in role
};

/// Profile bundle: a single JSON array of {date, price[24], background[24], renewable[24]}.
nlohmann::json profiles_to_json(std::span<const DayProfile> profiles);
std::vector<DayProfile> profiles_from_json(const nlohmann::json& j);
void save_bundle(const std::filesystem::path& file, std::span<const DayProfile> profiles);
std::vector<DayProfile> load_bundle(const std::filesystem::path& file);

/// Selects the profile with the given date; throws if absent.
const DayProfile& find_day(std::span<const DayProfile> profiles, const Date& date);
/// Profiles with date in [from, to], in date order; throws if the range is empty.
std::vector<DayProfile> select_range(std::span<const DayProfile> profiles, const Date& from,
                                     const Date& to);

}  // namespace hems
