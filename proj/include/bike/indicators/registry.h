#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bike/ingest/survey.h"
#include "bike/scaling/scaling.h"

namespace bike::indicators {

enum class category { connectivity, environment, infrastructure, perception, vci };
enum class source { svi, non_svi };

constexpr auto kCategories =
    std::array{category::connectivity, category::environment,
               category::infrastructure, category::perception, category::vci};

std::string_view to_string(category);
std::string_view to_string(source);
category parse_category(std::string_view);
source parse_source(std::string_view);

// What raw quantity an indicator is computed from.
enum class extraction {
  signalized_intersections,
  unsignalized_intersections,
  culdesacs,
  slope,
  poi_count,
  landuse_mix,
  air_quality,
  greenery,
  buildings,
  water,
  road_type,
  potholes,
  street_light,
  bike_lane,
  transit_count,
  pavement,
  street_amenity,
  utility_pole,
  bike_parking,
  road_width,
  sidewalk,
  crosswalk,
  curb_cut,
  perception_cycling_attractiveness,
  perception_spaciousness,
  perception_cleanliness,
  perception_building_attractiveness,
  perception_safety,
  perception_beauty,
  perception_living_attractiveness,
  vehicle_count,
  onstreet_parking,
  traffic_control,
  speed_control,
};

std::string_view to_string(extraction);
extraction parse_extraction(std::string_view);
std::optional<ingest::dimension> perception_dimension(extraction);

// Shape of the raw value an extraction produces; decides which scaling
// rules are admissible.
enum class raw_type { quantity, categorical_mean, width, presence };
raw_type raw_type_of(extraction);

// True when the extraction needs a buffer radius.
bool uses_radius(extraction);

struct indicator_spec {
  std::string name_;
  category category_{category::environment};
  source source_{source::non_svi};
  extraction extraction_{extraction::slope};
  scaling::scaling_rule scaling_;
  double radius_{0.0};  // meters; 0 when unused
};

struct registry {
  std::size_t size() const { return specs_.size(); }
  std::optional<std::size_t> find(std::string_view name) const;

  std::vector<indicator_spec> specs_;
};

// The 34-indicator table: 3 connectivity, 7 environment, 13 infrastructure,
// 7 perception, 4 vehicle-cyclist interaction; 21 sourced from imagery.
// Buffer aggregations use `buffer_radius`, edge aggregations `edge_radius`.
registry default_registry(double buffer_radius = 500.0,
                          double edge_radius = 100.0);

// Throws configuration-error on duplicate names, non-positive radii, or a
// scaling rule that does not fit the extraction's raw type.
void validate(registry const&);

registry registry_from_json(nlohmann::json const&);
nlohmann::json to_json(registry const&);

}  // namespace bike::indicators
