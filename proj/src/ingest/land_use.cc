#include "bike/ingest/land_use.h"

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/ingest/csv.h"
#include "bike/ingest/street_graph.h"

namespace bike::ingest {

using nlohmann::json;

std::string_view to_string(land_use const c) {
  switch (c) {
    case land_use::residential: return "residential";
    case land_use::commercial: return "commercial";
    case land_use::industrial: return "industrial";
  }
  return "?";
}

std::optional<land_use> parse_land_use_category(std::string_view const s) {
  for (auto const c :
       {land_use::residential, land_use::commercial, land_use::industrial}) {
    if (to_string(c) == s) {
      return c;
    }
  }
  return std::nullopt;
}

namespace {

geo::ring to_ring(json const& coords) {
  if (!coords.is_array()) {
    fail(error_kind::parse_error, "polygon ring must be an array");
  }
  auto r = geo::ring{};
  for (auto const& c : coords) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() ||
        !c[1].is_number()) {
      fail(error_kind::parse_error,
           fmt::format("invalid position {}", c.dump()));
    }
    r.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  return r;
}

geo::polygon to_polygon(json const& rings) {
  if (!rings.is_array() || rings.empty()) {
    fail(error_kind::parse_error, "polygon needs at least one ring");
  }
  auto holes = std::vector<geo::ring>{};
  for (auto i = std::size_t{1}; i < rings.size(); ++i) {
    holes.push_back(to_ring(rings[i]));
  }
  return geo::polygon{to_ring(rings[0]), std::move(holes)};
}

}  // namespace

land_use_dataset parse_land_use(std::string_view const text) {
  auto const doc = parse_json_with_context(text, "land use");
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    fail(error_kind::parse_error, "land use must be a GeoJSON FeatureCollection");
  }
  auto ds = land_use_dataset{};
  for (auto const& f : doc["features"]) {
    auto const props = f.value("properties", json::object());
    auto const cat_it = props.find("category");
    if (cat_it == props.end() || !cat_it->is_string()) {
      fail(error_kind::validation_error,
           "land use feature without string property 'category'");
    }
    auto const cat = parse_land_use_category(cat_it->get<std::string>());
    if (!cat.has_value()) {
      fail(error_kind::validation_error,
           fmt::format("land use category '{}' is not one of residential, "
                       "commercial, industrial",
                       cat_it->get<std::string>()));
    }
    auto const& geom = f.at("geometry");
    auto const type = geom.value("type", "");
    if (type == "Polygon") {
      ds.polygons_.push_back({to_polygon(geom.at("coordinates")), *cat});
    } else if (type == "MultiPolygon") {
      for (auto const& part : geom.at("coordinates")) {
        ds.polygons_.push_back({to_polygon(part), *cat});
      }
    } else {
      fail(error_kind::validation_error,
           fmt::format("land use geometry must be Polygon or MultiPolygon, "
                       "got '{}'",
                       type));
    }
  }
  return ds;
}

land_use_dataset load_land_use(std::filesystem::path const& path) {
  return parse_land_use(read_file(path));
}

}  // namespace bike::ingest
