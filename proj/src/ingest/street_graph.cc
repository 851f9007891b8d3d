#include "bike/ingest/street_graph.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <utility>

#include <fmt/core.h>
#include <fmt/ranges.h>

#include "bike/error.h"
#include "bike/ingest/csv.h"

namespace bike::ingest {

using nlohmann::json;

namespace {

std::string id_string(json const& v) {
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_number_integer()) {
    return std::to_string(v.get<long long>());
  }
  if (v.is_number()) {
    return fmt::format("{}", v.get<double>());
  }
  fail(error_kind::validation_error,
       fmt::format("id must be a string or number, got {}", v.dump()));
}

geo::geo_point coordinate(json const& c) {
  if (!c.is_array() || c.size() < 2 || !c[0].is_number() ||
      !c[1].is_number()) {
    fail(error_kind::parse_error,
         fmt::format("invalid GeoJSON position {}", c.dump()));
  }
  auto const p = geo::geo_point{c[0].get<double>(), c[1].get<double>()};
  if (!geo::is_valid(p)) {
    fail(error_kind::validation_error,
         fmt::format("position out of range {}", c.dump()));
  }
  return p;
}

bool truthy_tag(json const& v) {
  if (v.is_boolean()) {
    return v.get<bool>();
  }
  if (v.is_string()) {
    auto const s = v.get<std::string>();
    return !s.empty() && s != "no" && s != "none" && s != "false";
  }
  if (v.is_number()) {
    return v.get<double>() != 0.0;
  }
  return false;
}

std::optional<std::string> string_tag(json const& props, char const* key) {
  auto const it = props.find(key);
  if (it == props.end() || it->is_null()) {
    return std::nullopt;
  }
  if (it->is_string()) {
    return it->get<std::string>();
  }
  if (it->is_array() && !it->empty() && it->front().is_string()) {
    return it->front().get<std::string>();  // OSMnx merged-way lists
  }
  fail(error_kind::validation_error,
       fmt::format("property '{}' must be a string, got {}", key, it->dump()));
}

std::optional<double> width_tag(json const& props) {
  auto const it = props.find("width");
  if (it == props.end() || it->is_null()) {
    return std::nullopt;
  }
  auto w = std::optional<double>{};
  if (it->is_number()) {
    w = it->get<double>();
  } else if (it->is_string()) {
    auto s = it->get<std::string>();
    if (s.ends_with(" m")) {
      s.resize(s.size() - 2);
    } else if (s.ends_with("m")) {
      s.pop_back();
    }
    w = parse_double(s);
  }
  if (!w.has_value() || *w < 0.0) {
    fail(error_kind::validation_error,
         fmt::format("invalid width {}", it->dump()));
  }
  return w;
}

bool parking_tag(json const& props) {
  if (auto const it = props.find("parking"); it != props.end()) {
    return truthy_tag(*it);
  }
  for (auto const& [k, v] : props.items()) {
    if (k.starts_with("parking:lane") || k.starts_with("parking:both") ||
        k.starts_with("parking:left") || k.starts_with("parking:right")) {
      if (truthy_tag(v)) {
        return true;
      }
    }
  }
  return false;
}

bool signal_tag(json const& props) {
  if (auto const it = props.find("signalized"); it != props.end()) {
    return truthy_tag(*it);
  }
  auto const hw = props.find("highway");
  if (hw != props.end() && hw->is_string() &&
      hw->get<std::string>() == "traffic_signals") {
    return true;
  }
  auto const crossing = props.find("crossing");
  return crossing != props.end() && crossing->is_string() &&
         crossing->get<std::string>() == "traffic_signals";
}

bool calming_tag(json const& props) {
  auto const it = props.find("traffic_calming");
  return it != props.end() && truthy_tag(*it);
}

std::string kind_of(json const& feature) {
  auto const& props = feature.value("properties", json::object());
  if (auto const it = props.find("kind"); it != props.end()) {
    if (!it->is_string()) {
      fail(error_kind::validation_error, "properties.kind must be a string");
    }
    return it->get<std::string>();
  }
  auto const type = feature.at("geometry").value("type", "");
  return type == "LineString" ? "edge" : "node";
}

}  // namespace

json parse_json_with_context(std::string_view const text,
                             std::string_view const what) {
  try {
    return json::parse(text);
  } catch (json::parse_error const& e) {
    auto const offset = std::min<std::size_t>(e.byte, text.size());
    auto const prefix = text.substr(0, offset == 0 ? 0 : offset - 1);
    auto const line = 1 + std::count(begin(prefix), end(prefix), '\n');
    auto const last_nl = prefix.rfind('\n');
    auto const col =
        last_nl == std::string_view::npos ? offset : offset - 1 - last_nl;
    fail(error_kind::parse_error,
         fmt::format("{}: malformed JSON at line {}, column {}: {}", what,
                     line, col, e.what()));
  }
}

std::optional<std::size_t> street_graph::find_node(
    std::string_view const id) const {
  auto const it = node_index_.find(std::string{id});
  if (it == end(node_index_)) {
    return std::nullopt;
  }
  return it->second;
}

void street_graph::finalize() {
  node_index_.clear();
  for (auto i = std::size_t{0}; i != nodes_.size(); ++i) {
    if (!node_index_.emplace(nodes_[i].id_, i).second) {
      fail(error_kind::integrity_error,
           fmt::format("duplicate node id '{}'", nodes_[i].id_));
    }
  }
  adjacency_.assign(nodes_.size(), {});
  degree_.assign(nodes_.size(), 0U);
  auto neighbours = std::vector<std::set<std::size_t>>(nodes_.size());
  for (auto i = std::size_t{0}; i != edges_.size(); ++i) {
    auto const& e = edges_[i];
    if (e.from_ >= nodes_.size() || e.to_ >= nodes_.size()) {
      fail(error_kind::integrity_error,
           fmt::format("edge '{}' references a missing node", e.id_));
    }
    adjacency_[e.from_].push_back(i);
    if (e.to_ != e.from_) {
      adjacency_[e.to_].push_back(i);
      neighbours[e.from_].insert(e.to_);
      neighbours[e.to_].insert(e.from_);
    }
  }
  for (auto i = std::size_t{0}; i != nodes_.size(); ++i) {
    degree_[i] = neighbours[i].size();
  }
}

street_graph parse_street_graph(std::string_view const text) {
  auto const doc = parse_json_with_context(text, "street graph");
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    fail(error_kind::parse_error,
         "street graph must be a GeoJSON FeatureCollection");
  }

  auto g = street_graph{};
  auto by_id = std::unordered_map<std::string, std::size_t>{};
  auto by_position = std::map<std::pair<double, double>, std::size_t>{};

  auto const add_node = [&](graph_node n) {
    if (by_id.contains(n.id_)) {
      fail(error_kind::integrity_error,
           fmt::format("duplicate node id '{}'", n.id_));
    }
    by_id.emplace(n.id_, g.nodes_.size());
    by_position.try_emplace({n.location_.lon_, n.location_.lat_},
                            g.nodes_.size());
    g.nodes_.push_back(std::move(n));
    return g.nodes_.size() - 1;
  };

  auto edge_features = std::vector<json const*>{};
  for (auto const& f : doc["features"]) {
    if (!f.is_object() || !f.contains("geometry") ||
        !f["geometry"].is_object()) {
      fail(error_kind::parse_error, "feature without geometry object");
    }
    auto const& geom = f["geometry"];
    auto const type = geom.value("type", "");
    auto const kind = kind_of(f);
    auto const props = f.value("properties", json::object());

    if (kind == "edge") {
      if (type != "LineString") {
        fail(error_kind::validation_error,
             fmt::format("edge feature must be a LineString, got '{}'", type));
      }
      edge_features.push_back(&f);
      continue;
    }
    if (type != "Point") {
      fail(error_kind::validation_error,
           fmt::format("'{}' feature must be a Point, got '{}'", kind, type));
    }
    auto const loc = coordinate(geom.at("coordinates"));
    if (kind == "node") {
      auto n = graph_node{};
      n.id_ = props.contains("id") ? id_string(props["id"])
                                   : fmt::format("n{}", g.nodes_.size());
      n.location_ = loc;
      n.signalized_ = signal_tag(props);
      n.traffic_calming_ = calming_tag(props);
      add_node(std::move(n));
    } else if (kind == "poi") {
      g.pois_.push_back(loc);
    } else if (kind == "transit") {
      g.transit_stops_.push_back(loc);
    } else {
      fail(error_kind::validation_error,
           fmt::format("unknown feature kind '{}'", kind));
    }
  }

  auto dangling = std::vector<std::string>{};
  for (auto const* f : edge_features) {
    auto const props = f->value("properties", json::object());
    auto const& coords = (*f)["geometry"].at("coordinates");
    if (!coords.is_array() || coords.size() < 2) {
      fail(error_kind::parse_error, "LineString needs at least 2 positions");
    }
    auto e = graph_edge{};
    e.id_ = props.contains("id") ? id_string(props["id"])
                                 : fmt::format("e{}", g.edges_.size());
    for (auto const& c : coords) {
      e.geometry_.push_back(coordinate(c));
    }

    auto const endpoint = [&](char const* key, geo::geo_point const& pos)
        -> std::optional<std::size_t> {
      if (props.contains(key) && !props[key].is_null()) {
        auto const id = id_string(props[key]);
        if (auto const it = by_id.find(id); it != end(by_id)) {
          return it->second;
        }
        dangling.push_back(fmt::format("{} (edge {})", id, e.id_));
        return std::nullopt;
      }
      if (auto const it = by_position.find({pos.lon_, pos.lat_});
          it != end(by_position)) {
        return it->second;
      }
      return add_node(graph_node{.id_ = fmt::format("{},{}", pos.lon_, pos.lat_),
                                 .location_ = pos});
    };
    auto const from = endpoint("u", e.geometry_.front());
    auto const to = endpoint("v", e.geometry_.back());
    if (!from.has_value() || !to.has_value()) {
      continue;
    }
    e.from_ = *from;
    e.to_ = *to;
    e.highway_ = string_tag(props, "highway").value_or("");
    e.surface_ = string_tag(props, "surface");
    e.width_ = width_tag(props);
    e.onstreet_parking_ = parking_tag(props);
    g.edges_.push_back(std::move(e));
  }
  if (!dangling.empty()) {
    fail(error_kind::integrity_error,
         fmt::format("edges reference missing nodes: {}",
                     fmt::join(dangling, ", ")));
  }

  g.finalize();
  return g;
}

street_graph load_street_graph(std::filesystem::path const& path) {
  return parse_street_graph(read_file(path));
}

json to_geojson(street_graph const& g) {
  auto features = json::array();
  auto const point = [](geo::geo_point const& p) {
    return json::array({p.lon_, p.lat_});
  };
  for (auto const& n : g.nodes_) {
    features.push_back(
        {{"type", "Feature"},
         {"geometry", {{"type", "Point"}, {"coordinates", point(n.location_)}}},
         {"properties",
          {{"kind", "node"},
           {"id", n.id_},
           {"signalized", n.signalized_},
           {"traffic_calming", n.traffic_calming_}}}});
  }
  for (auto const& e : g.edges_) {
    auto coords = json::array();
    if (e.geometry_.empty()) {
      coords.push_back(point(g.nodes_[e.from_].location_));
      coords.push_back(point(g.nodes_[e.to_].location_));
    } else {
      for (auto const& p : e.geometry_) {
        coords.push_back(point(p));
      }
    }
    auto props = json{{"kind", "edge"},
                      {"id", e.id_},
                      {"u", g.nodes_[e.from_].id_},
                      {"v", g.nodes_[e.to_].id_},
                      {"highway", e.highway_},
                      {"parking", e.onstreet_parking_}};
    if (e.surface_.has_value()) {
      props["surface"] = *e.surface_;
    }
    if (e.width_.has_value()) {
      props["width"] = *e.width_;
    }
    features.push_back(
        {{"type", "Feature"},
         {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
         {"properties", props}});
  }
  auto const add_points = [&](auto const& pts, char const* kind) {
    for (auto const& p : pts) {
      features.push_back(
          {{"type", "Feature"},
           {"geometry", {{"type", "Point"}, {"coordinates", point(p)}}},
           {"properties", {{"kind", kind}}}});
    }
  };
  add_points(g.pois_, "poi");
  add_points(g.transit_stops_, "transit");
  return {{"type", "FeatureCollection"}, {"features", features}};
}

void write_street_graph(street_graph const& g,
                        std::filesystem::path const& path) {
  auto out = std::ofstream{path, std::ios::binary};
  if (!out) {
    fail(error_kind::io_error,
         fmt::format("cannot write '{}'", path.string()));
  }
  out << to_geojson(g).dump() << '\n';
}

}  // namespace bike::ingest
