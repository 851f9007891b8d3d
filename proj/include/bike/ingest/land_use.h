#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "bike/geo/polygon.h"

namespace bike::ingest {

enum class land_use { residential, commercial, industrial };

constexpr auto kLandUseCategories = 3;

std::string_view to_string(land_use);
std::optional<land_use> parse_land_use_category(std::string_view);

struct land_use_polygon {
  geo::polygon geometry_;
  land_use category_;
};

struct land_use_dataset {
  std::vector<land_use_polygon> polygons_;
};

// GeoJSON FeatureCollection of Polygon / MultiPolygon features whose
// `category` property is residential, commercial or industrial
// (validation-error otherwise). MultiPolygons expand to one entry per part.
land_use_dataset parse_land_use(std::string_view text);
land_use_dataset load_land_use(std::filesystem::path const& path);

}  // namespace bike::ingest
