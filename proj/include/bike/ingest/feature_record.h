#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bike/geo/geo_point.h"

namespace bike::ingest {

// Segmentation classes consumed by the indicator and perception modules.
namespace seg {
constexpr auto kGreenery = "greenery";
constexpr auto kBuilding = "building";
constexpr auto kWater = "water";
constexpr auto kSky = "sky";
constexpr auto kStreet = "street";
constexpr auto kCurb = "curb";
constexpr auto kTerrain = "terrain";
constexpr auto kUtilityPole = "utility-pole";
constexpr auto kPothole = "pothole";
constexpr auto kStreetLight = "street-light";
constexpr auto kBikeLane = "bike-lane";
constexpr auto kStreetAmenity = "street-amenity";
constexpr auto kBikeParking = "bike-parking";
constexpr auto kSidewalk = "sidewalk";
constexpr auto kCrosswalk = "crosswalk";
constexpr auto kCurbCut = "curb-cut";
constexpr auto kTrafficLight = "traffic-light";
constexpr auto kStopSign = "stop-sign";
}  // namespace seg

// Low-level image statistics, named as in the perception feature table.
constexpr auto kLowLevelFields = std::array<char const*, 8>{
    "canny_edge_llf",      "no_of_blobs_llf",    "hue_mean_llf",
    "hue_std_llf",         "lightness_mean_llf", "lightness_std_llf",
    "saturation_mean_llf", "saturation_std_llf"};

struct feature_record {
  double seg(std::string_view cls) const;
  std::int64_t count(std::string_view cls) const;
  double scene(std::string_view label) const;

  std::string image_id_;
  geo::geo_point location_;
  std::map<std::string, double, std::less<>> seg_fraction_;
  std::map<std::string, std::int64_t, std::less<>> object_count_;
  std::map<std::string, double, std::less<>> scene_prob_;
  std::map<std::string, double, std::less<>> lowlevel_;
};

// Validates and converts one JSON object. Fractions must lie in [0,1] and sum
// to at most 1 + 1e-6; counts must be non-negative integers.
feature_record parse_feature_record(nlohmann::json const& obj);
nlohmann::json to_json(feature_record const&);

// JSON-lines; blank lines ignored; duplicate image_id is a validation-error.
std::vector<feature_record> parse_feature_records(std::string_view text);
std::vector<feature_record> load_feature_records(
    std::filesystem::path const& path);
void write_feature_records(std::vector<feature_record> const&,
                           std::filesystem::path const&);

}  // namespace bike::ingest
