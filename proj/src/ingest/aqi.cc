#include "bike/ingest/aqi.h"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/ingest/csv.h"

namespace bike::ingest {

std::vector<aqi_station> parse_aqi_stations(std::string_view const text,
                                            warnings* w) {
  auto const table = parse_csv(text);
  auto const c_id = table.column("station_id");
  auto const c_lon = table.column("lon");
  auto const c_lat = table.column("lat");
  auto const c_date = table.column("date");
  auto const c_value = table.column("value");

  struct accum {
    std::string id_;
    geo::geo_point location_;
    std::map<std::string, double> daily_max_;
  };
  auto stations = std::vector<accum>{};
  auto index = std::unordered_map<std::string, std::size_t>{};

  for (auto const& row : table.rows_) {
    auto const& f = row.fields_;
    auto const lon = parse_double(f[c_lon]);
    auto const lat = parse_double(f[c_lat]);
    if (!lon.has_value() || !lat.has_value() ||
        !geo::is_valid({*lon, *lat})) {
      fail(error_kind::validation_error,
           fmt::format("line {}: invalid station coordinates", row.line_));
    }
    auto [it, inserted] = index.try_emplace(f[c_id], stations.size());
    if (inserted) {
      stations.push_back(accum{f[c_id], {*lon, *lat}, {}});
    }
    auto& s = stations[it->second];

    if (f[c_value].find_first_not_of(' ') == std::string::npos) {
      continue;
    }
    auto const value = parse_double(f[c_value]);
    if (!value.has_value()) {
      fail(error_kind::validation_error,
           fmt::format("line {}: value '{}' is not numeric", row.line_,
                       f[c_value]));
    }
    if (*value < 0.0) {
      fail(error_kind::validation_error,
           fmt::format("line {}: negative value {}", row.line_, *value));
    }
    auto [d, fresh] = s.daily_max_.try_emplace(f[c_date], *value);
    if (!fresh) {
      d->second = std::max(d->second, *value);
    }
  }

  auto out = std::vector<aqi_station>{};
  for (auto& s : stations) {
    if (s.daily_max_.empty()) {
      warn(w, fmt::format("AQI station '{}' has no measurements; excluded",
                          s.id_));
      continue;
    }
    auto st = aqi_station{s.id_, s.location_, {}, 0.0};
    auto sum = 0.0;
    for (auto const& [date, v] : s.daily_max_) {
      st.daily_maxima_.emplace_back(date, v);
      sum += v;
    }
    st.annual_mean_ = sum / static_cast<double>(st.daily_maxima_.size());
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<aqi_station> load_aqi_stations(std::filesystem::path const& path,
                                           warnings* w) {
  return parse_aqi_stations(read_file(path), w);
}

}  // namespace bike::ingest
