#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bike/geo/geo_point.h"
#include "bike/warnings.h"

namespace bike::ingest {

struct aqi_station {
  std::string id_;
  geo::geo_point location_;
  std::vector<std::pair<std::string, double>> daily_maxima_;  // date order
  double annual_mean_{0.0};  // mean of daily_maxima_
};

// CSV with columns station_id, lon, lat, date, value (µg/m³). Several rows
// per (station, date), e.g. one per pollutant, collapse to their maximum.
// Rows with an empty value carry no measurement; a station left without
// any measurement is dropped with a warning. Stations are returned in order
// of first appearance.
std::vector<aqi_station> parse_aqi_stations(std::string_view text,
                                            warnings* w = nullptr);
std::vector<aqi_station> load_aqi_stations(std::filesystem::path const& path,
                                           warnings* w = nullptr);

}  // namespace bike::ingest
