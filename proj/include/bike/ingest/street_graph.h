#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "bike/geo/geo_point.h"

namespace bike::ingest {

struct graph_node {
  std::string id_;
  geo::geo_point location_;
  bool signalized_{false};
  bool traffic_calming_{false};
};

struct graph_edge {
  std::string id_;
  std::size_t from_{0};  // node index
  std::size_t to_{0};
  std::string highway_;  // verbatim; unknown classes score 0 downstream
  std::optional<std::string> surface_;
  std::optional<double> width_;  // meters
  bool onstreet_parking_{false};
  std::vector<geo::geo_point> geometry_;
};

// Undirected street graph plus POI and transit point layers. Node degree is
// the number of distinct neighbouring nodes, so two-way streets stored as a
// pair of opposite edges count once.
struct street_graph {
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t degree(std::size_t const node) const { return degree_[node]; }
  std::optional<std::size_t> find_node(std::string_view id) const;

  // Rebuilds adjacency, degrees and the id lookup from nodes_/edges_.
  // Throws integrity-error if an edge references a missing node index.
  void finalize();

  std::vector<graph_node> nodes_;
  std::vector<graph_edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;  // node -> edge indices
  std::vector<std::size_t> degree_;
  std::vector<geo::geo_point> pois_;
  std::vector<geo::geo_point> transit_stops_;
  std::unordered_map<std::string, std::size_t> node_index_;
};

// GeoJSON FeatureCollection; see README for the property vocabulary.
street_graph parse_street_graph(std::string_view text);
street_graph load_street_graph(std::filesystem::path const& path);

nlohmann::json to_geojson(street_graph const&);
void write_street_graph(street_graph const&, std::filesystem::path const&);

// Throws parse-error with line:column derived from the parser's byte offset.
nlohmann::json parse_json_with_context(std::string_view text,
                                       std::string_view what);

}  // namespace bike::ingest
