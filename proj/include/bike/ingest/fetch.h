#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace bike::ingest {

struct bbox_query {
  double min_lon_{0.0};
  double min_lat_{0.0};
  double max_lon_{0.0};
  double max_lat_{0.0};
};

struct fetch_options {
  int attempts_{3};
  std::chrono::milliseconds initial_backoff_{500};  // doubles per retry
  std::size_t max_bytes_{512U << 20U};
  std::chrono::seconds timeout_{180};
};

// Overpass QL selecting highways, signal/calming nodes, POIs and transit stops.
std::string overpass_query(bbox_query const&);

// Converts an Overpass `out body` JSON document into the street graph GeoJSON
// understood by load_street_graph. Ways are split at shared nodes, way ends
// and signal/calming nodes.
nlohmann::json overpass_to_geojson(nlohmann::json const& osm);

// GETs `endpoint?data=<query>`. A GeoJSON FeatureCollection response is
// validated and stored verbatim; an Overpass JSON response is converted.
// Throws invalid-argument (bad bbox/URL), fetch-error (no 200 after all
// attempts), size-error (body above max_bytes).
void fetch_street_network(bbox_query const& bbox, std::string_view endpoint,
                          std::filesystem::path const& out,
                          fetch_options const& opt = {});

}  // namespace bike::ingest
