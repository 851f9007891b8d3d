#include "bike/indicators/registry.h"

#include <set>

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::indicators {

using nlohmann::json;
using scaling::rule_kind;
using scaling::scaling_rule;

namespace {

constexpr auto kExtractionNames = std::array<std::pair<extraction, char const*>, 34>{{
    {extraction::signalized_intersections, "signalized_intersections"},
    {extraction::unsignalized_intersections, "unsignalized_intersections"},
    {extraction::culdesacs, "culdesacs"},
    {extraction::slope, "slope"},
    {extraction::poi_count, "poi_count"},
    {extraction::landuse_mix, "landuse_mix"},
    {extraction::air_quality, "air_quality"},
    {extraction::greenery, "greenery"},
    {extraction::buildings, "buildings"},
    {extraction::water, "water"},
    {extraction::road_type, "road_type"},
    {extraction::potholes, "potholes"},
    {extraction::street_light, "street_light"},
    {extraction::bike_lane, "bike_lane"},
    {extraction::transit_count, "transit_count"},
    {extraction::pavement, "pavement"},
    {extraction::street_amenity, "street_amenity"},
    {extraction::utility_pole, "utility_pole"},
    {extraction::bike_parking, "bike_parking"},
    {extraction::road_width, "road_width"},
    {extraction::sidewalk, "sidewalk"},
    {extraction::crosswalk, "crosswalk"},
    {extraction::curb_cut, "curb_cut"},
    {extraction::perception_cycling_attractiveness, "perception:cycling_attractiveness"},
    {extraction::perception_spaciousness, "perception:spaciousness"},
    {extraction::perception_cleanliness, "perception:cleanliness"},
    {extraction::perception_building_attractiveness, "perception:building_attractiveness"},
    {extraction::perception_safety, "perception:safety"},
    {extraction::perception_beauty, "perception:beauty"},
    {extraction::perception_living_attractiveness, "perception:living_attractiveness"},
    {extraction::vehicle_count, "vehicle_count"},
    {extraction::onstreet_parking, "onstreet_parking"},
    {extraction::traffic_control, "traffic_control"},
    {extraction::speed_control, "speed_control"},
}};

scaling_rule rule(rule_kind const k, bool const invert = false) {
  auto r = scaling_rule{};
  r.kind_ = k;
  r.invert_ = invert;
  return r;
}

}  // namespace

std::string_view to_string(category const c) {
  switch (c) {
    case category::connectivity: return "connectivity";
    case category::environment: return "environment";
    case category::infrastructure: return "infrastructure";
    case category::perception: return "perception";
    case category::vci: return "vci";
  }
  return "?";
}

std::string_view to_string(source const s) {
  return s == source::svi ? "svi" : "non_svi";
}

category parse_category(std::string_view const s) {
  for (auto const c : kCategories) {
    if (to_string(c) == s) {
      return c;
    }
  }
  fail(error_kind::configuration_error,
       fmt::format("unknown indicator category '{}'", s));
}

source parse_source(std::string_view const s) {
  if (s == "svi") {
    return source::svi;
  }
  if (s == "non_svi") {
    return source::non_svi;
  }
  fail(error_kind::configuration_error,
       fmt::format("unknown indicator source '{}'", s));
}

std::string_view to_string(extraction const e) {
  for (auto const& [k, name] : kExtractionNames) {
    if (k == e) {
      return name;
    }
  }
  return "?";
}

extraction parse_extraction(std::string_view const s) {
  for (auto const& [k, name] : kExtractionNames) {
    if (name == s) {
      return k;
    }
  }
  fail(error_kind::configuration_error,
       fmt::format("unknown extraction rule '{}'", s));
}

std::optional<ingest::dimension> perception_dimension(extraction const e) {
  using ingest::dimension;
  switch (e) {
    case extraction::perception_cycling_attractiveness:
      return dimension::cycling_attractiveness;
    case extraction::perception_spaciousness: return dimension::spaciousness;
    case extraction::perception_cleanliness: return dimension::cleanliness;
    case extraction::perception_building_attractiveness:
      return dimension::building_attractiveness;
    case extraction::perception_safety: return dimension::safety;
    case extraction::perception_beauty: return dimension::beauty;
    case extraction::perception_living_attractiveness:
      return dimension::living_attractiveness;
    default: return std::nullopt;
  }
}

raw_type raw_type_of(extraction const e) {
  switch (e) {
    case extraction::road_type:
    case extraction::pavement: return raw_type::categorical_mean;
    case extraction::road_width: return raw_type::width;
    case extraction::potholes:
    case extraction::street_light:
    case extraction::bike_lane:
    case extraction::street_amenity:
    case extraction::utility_pole:
    case extraction::bike_parking:
    case extraction::sidewalk:
    case extraction::crosswalk:
    case extraction::curb_cut:
    case extraction::onstreet_parking:
    case extraction::traffic_control:
    case extraction::speed_control: return raw_type::presence;
    default: return raw_type::quantity;
  }
}

bool uses_radius(extraction const e) {
  switch (e) {
    case extraction::signalized_intersections:
    case extraction::unsignalized_intersections:
    case extraction::culdesacs:
    case extraction::poi_count:
    case extraction::landuse_mix:
    case extraction::road_type:
    case extraction::transit_count:
    case extraction::pavement:
    case extraction::road_width:
    case extraction::vehicle_count:
    case extraction::onstreet_parking:
    case extraction::speed_control: return true;
    default: return false;
  }
}

std::optional<std::size_t> registry::find(std::string_view const name) const {
  for (auto i = std::size_t{0}; i != specs_.size(); ++i) {
    if (specs_[i].name_ == name) {
      return i;
    }
  }
  return std::nullopt;
}

registry default_registry(double const buffer_radius,
                          double const edge_radius) {
  using c = category;
  using e = extraction;
  auto const svi = source::svi;
  auto const osm = source::non_svi;
  auto const mm = rule(rule_kind::min_max);
  auto const neg = rule(rule_kind::neg_min_max);
  auto const present = rule(rule_kind::presence);
  auto const absent = rule(rule_kind::presence, true);

  auto r = registry{};
  r.specs_ = {
      {"signalized_intersections", c::connectivity, osm, e::signalized_intersections, neg, buffer_radius},
      {"unsignalized_intersections", c::connectivity, osm, e::unsignalized_intersections, neg, buffer_radius},
      {"culdesacs", c::connectivity, osm, e::culdesacs, neg, buffer_radius},

      {"slope", c::environment, osm, e::slope, neg, 0.0},
      {"poi", c::environment, osm, e::poi_count, mm, buffer_radius},
      {"landuse_mix", c::environment, osm, e::landuse_mix, mm, buffer_radius},
      {"air_quality", c::environment, osm, e::air_quality, neg, 0.0},
      {"greenery", c::environment, svi, e::greenery, mm, 0.0},
      {"buildings", c::environment, svi, e::buildings, mm, 0.0},
      {"water", c::environment, svi, e::water, mm, 0.0},

      {"road_type", c::infrastructure, osm, e::road_type, scaling::road_type_rule(), edge_radius},
      {"potholes", c::infrastructure, svi, e::potholes, absent, 0.0},
      {"street_light", c::infrastructure, svi, e::street_light, present, 0.0},
      {"bike_lane", c::infrastructure, svi, e::bike_lane, present, 0.0},
      {"transit", c::infrastructure, osm, e::transit_count, mm, buffer_radius},
      {"pavement", c::infrastructure, osm, e::pavement, scaling::pavement_rule(), edge_radius},
      {"street_amenity", c::infrastructure, svi, e::street_amenity, present, 0.0},
      {"utility_pole", c::infrastructure, svi, e::utility_pole, absent, 0.0},
      {"bike_parking", c::infrastructure, svi, e::bike_parking, present, 0.0},
      {"road_width", c::infrastructure, osm, e::road_width, rule(rule_kind::width_over_10), edge_radius},
      {"sidewalk", c::infrastructure, svi, e::sidewalk, present, 0.0},
      {"crosswalk", c::infrastructure, svi, e::crosswalk, present, 0.0},
      {"curb_cut", c::infrastructure, svi, e::curb_cut, present, 0.0},

      {"cycling_attractiveness", c::perception, svi, e::perception_cycling_attractiveness, mm, 0.0},
      {"spaciousness", c::perception, svi, e::perception_spaciousness, mm, 0.0},
      {"cleanliness", c::perception, svi, e::perception_cleanliness, mm, 0.0},
      {"building_attractiveness", c::perception, svi, e::perception_building_attractiveness, mm, 0.0},
      {"safety", c::perception, svi, e::perception_safety, mm, 0.0},
      {"beauty", c::perception, svi, e::perception_beauty, mm, 0.0},
      {"living_attractiveness", c::perception, svi, e::perception_living_attractiveness, mm, 0.0},

      {"vehicles", c::vci, svi, e::vehicle_count, neg, buffer_radius},
      {"onstreet_parking", c::vci, osm, e::onstreet_parking, absent, edge_radius},
      {"traffic_control", c::vci, svi, e::traffic_control, present, 0.0},
      {"speed_control", c::vci, osm, e::speed_control, present, edge_radius},
  };
  return r;
}

void validate(registry const& r) {
  if (r.specs_.empty()) {
    fail(error_kind::configuration_error, "indicator registry is empty");
  }
  auto names = std::set<std::string, std::less<>>{};
  for (auto const& s : r.specs_) {
    if (s.name_.empty() || !names.insert(s.name_).second) {
      fail(error_kind::configuration_error,
           fmt::format("indicator name '{}' is empty or duplicated", s.name_));
    }
    if (uses_radius(s.extraction_) && !(s.radius_ > 0.0)) {
      fail(error_kind::configuration_error,
           fmt::format("indicator '{}' needs a positive radius", s.name_));
    }
    scaling::validate(s.scaling_);

    auto const kind = s.scaling_.kind_;
    auto ok = false;
    switch (raw_type_of(s.extraction_)) {
      case raw_type::quantity:
        ok = kind == rule_kind::min_max || kind == rule_kind::neg_min_max;
        break;
      case raw_type::categorical_mean:
        ok = kind == rule_kind::categorical;
        break;
      case raw_type::width:
        ok = kind == rule_kind::width_over_10 || kind == rule_kind::min_max ||
             kind == rule_kind::neg_min_max;
        break;
      case raw_type::presence: ok = kind == rule_kind::presence; break;
    }
    if (!ok) {
      fail(error_kind::configuration_error,
           fmt::format("indicator '{}': scaling '{}' does not fit extraction "
                       "'{}'",
                       s.name_, scaling::to_string(kind),
                       to_string(s.extraction_)));
    }
  }
}

registry registry_from_json(json const& j) {
  auto r = registry{};
  try {
    for (auto const& item : j.at("indicators")) {
      auto s = indicator_spec{};
      s.name_ = item.at("name").get<std::string>();
      s.category_ = parse_category(item.at("category").get<std::string>());
      s.source_ = parse_source(item.at("source").get<std::string>());
      s.extraction_ = parse_extraction(item.at("extraction").get<std::string>());
      s.scaling_ = scaling::from_json(item.at("scaling"));
      s.radius_ = item.value("radius", 0.0);
      r.specs_.push_back(std::move(s));
    }
  } catch (json::exception const& e) {
    fail(error_kind::configuration_error,
         fmt::format("malformed indicator registry: {}", e.what()));
  }
  validate(r);
  return r;
}

json to_json(registry const& r) {
  auto items = json::array();
  for (auto const& s : r.specs_) {
    auto item = json{{"name", s.name_},
                     {"category", to_string(s.category_)},
                     {"source", to_string(s.source_)},
                     {"extraction", to_string(s.extraction_)},
                     {"scaling", scaling::to_json(s.scaling_)}};
    if (uses_radius(s.extraction_)) {
      item["radius"] = s.radius_;
    }
    items.push_back(std::move(item));
  }
  return {{"indicators", items}};
}

}  // namespace bike::indicators
