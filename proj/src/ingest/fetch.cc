#include "httplib.h"

#include "bike/ingest/fetch.h"

#include <cmath>
#include <fstream>
#include <map>
#include <thread>
#include <unordered_map>

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/geo/geo_point.h"
#include "bike/ingest/street_graph.h"

namespace bike::ingest {

using nlohmann::json;

namespace {

void check_bbox(bbox_query const& b) {
  auto const ok = geo::is_valid({b.min_lon_, b.min_lat_}) &&
                  geo::is_valid({b.max_lon_, b.max_lat_});
  if (!ok || b.min_lon_ >= b.max_lon_ || b.min_lat_ >= b.max_lat_) {
    fail(error_kind::invalid_argument,
         fmt::format("invalid bbox ({}, {}, {}, {}): need min < max within "
                     "WGS84 bounds",
                     b.min_lon_, b.min_lat_, b.max_lon_, b.max_lat_));
  }
}

std::pair<std::string, std::string> split_url(std::string_view const url) {
  auto const scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos ||
      (url.substr(0, scheme_end) != "http" &&
       url.substr(0, scheme_end) != "https")) {
    fail(error_kind::invalid_argument,
         fmt::format("endpoint '{}' must start with http:// or https://", url));
  }
  auto const path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string_view::npos) {
    return {std::string{url}, "/"};
  }
  return {std::string{url.substr(0, path_begin)},
          std::string{url.substr(path_begin)}};
}

bool has_tag(json const& tags, char const* key) {
  return tags.is_object() && tags.contains(key);
}

std::string tag(json const& tags, char const* key) {
  if (!tags.is_object()) {
    return {};
  }
  auto const it = tags.find(key);
  return it != tags.end() && it->is_string() ? it->get<std::string>()
                                             : std::string{};
}

bool is_transit(json const& tags) {
  auto const pt = tag(tags, "public_transport");
  auto const rw = tag(tags, "railway");
  return pt == "platform" || pt == "stop_position" || pt == "station" ||
         tag(tags, "highway") == "bus_stop" || rw == "station" ||
         rw == "halt" || rw == "tram_stop";
}

bool is_poi(json const& tags) {
  return has_tag(tags, "amenity") || has_tag(tags, "shop") ||
         has_tag(tags, "tourism") || has_tag(tags, "leisure");
}

bool splits_way(json const& tags) {
  return tag(tags, "highway") == "traffic_signals" ||
         has_tag(tags, "traffic_calming");
}

}  // namespace

std::string overpass_query(bbox_query const& b) {
  check_bbox(b);
  auto const box = fmt::format("({},{},{},{})", b.min_lat_, b.min_lon_,
                               b.max_lat_, b.max_lon_);
  return fmt::format(
      "[out:json][timeout:180];("
      "way[\"highway\"]{0};"
      "node[\"highway\"=\"traffic_signals\"]{0};"
      "node[\"traffic_calming\"]{0};"
      "node[\"amenity\"]{0};node[\"shop\"]{0};"
      "node[\"public_transport\"]{0};node[\"highway\"=\"bus_stop\"]{0};"
      "node[\"railway\"~\"station|halt|tram_stop\"]{0};"
      ");(._;>;);out body;",
      box);
}

json overpass_to_geojson(json const& osm) {
  if (!osm.is_object() || !osm.contains("elements") ||
      !osm["elements"].is_array()) {
    fail(error_kind::parse_error, "Overpass response lacks an 'elements' array");
  }
  struct osm_node {
    geo::geo_point pos_;
    json tags_;
  };
  auto nodes = std::map<long long, osm_node>{};
  auto ways = std::vector<json const*>{};
  for (auto const& e : osm["elements"]) {
    auto const type = e.value("type", "");
    if (type == "node") {
      nodes[e.at("id").get<long long>()] = {
          {e.at("lon").get<double>(), e.at("lat").get<double>()},
          e.value("tags", json::object())};
    } else if (type == "way" && has_tag(e.value("tags", json::object()),
                                        "highway")) {
      ways.push_back(&e);
    }
  }

  auto use_count = std::unordered_map<long long, int>{};
  for (auto const* w : ways) {
    for (auto const& n : w->at("nodes")) {
      ++use_count[n.get<long long>()];
    }
  }

  auto features = json::array();
  auto vertex_written = std::unordered_map<long long, bool>{};
  auto const write_vertex = [&](long long const id) {
    if (vertex_written[id]) {
      return;
    }
    vertex_written[id] = true;
    auto const& n = nodes.at(id);
    auto props = json{{"kind", "node"}, {"id", id}};
    if (tag(n.tags_, "highway") == "traffic_signals") {
      props["highway"] = "traffic_signals";
    }
    if (has_tag(n.tags_, "traffic_calming")) {
      props["traffic_calming"] = tag(n.tags_, "traffic_calming");
    }
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "Point"},
           {"coordinates", json::array({n.pos_.lon_, n.pos_.lat_})}}},
         {"properties", props}});
  };

  auto edge_features = json::array();
  for (auto const* w : ways) {
    auto const& refs = w->at("nodes");
    auto const tags = w->value("tags", json::object());
    if (refs.size() < 2 || tag(tags, "area") == "yes") {
      continue;
    }
    auto props = json{{"kind", "edge"}, {"highway", tag(tags, "highway")}};
    if (has_tag(tags, "surface")) {
      props["surface"] = tag(tags, "surface");
    }
    if (has_tag(tags, "width")) {
      props["width"] = tag(tags, "width");
    }
    auto parking = false;
    for (auto const& [k, v] : tags.items()) {
      if ((k.starts_with("parking:lane") || k.starts_with("parking:both") ||
           k.starts_with("parking:left") || k.starts_with("parking:right")) &&
          v.is_string() && v.get<std::string>() != "no" &&
          v.get<std::string>() != "none") {
        parking = true;
      }
    }
    props["parking"] = parking;

    auto segment = json::array();
    auto seg_start = refs.front().get<long long>();
    auto part = 0;
    for (auto i = std::size_t{0}; i != refs.size(); ++i) {
      auto const id = refs[i].get<long long>();
      if (!nodes.contains(id)) {
        fail(error_kind::integrity_error,
             fmt::format("way {} references missing node {}",
                         w->at("id").get<long long>(), id));
      }
      auto const& p = nodes.at(id).pos_;
      segment.push_back(json::array({p.lon_, p.lat_}));
      auto const is_vertex = i == 0 || i + 1 == refs.size() ||
                             use_count[id] > 1 || splits_way(nodes.at(id).tags_);
      if (i != 0 && is_vertex) {
        auto eprops = props;
        eprops["id"] =
            fmt::format("w{}_{}", w->at("id").get<long long>(), part++);
        eprops["u"] = seg_start;
        eprops["v"] = id;
        write_vertex(seg_start);
        write_vertex(id);
        edge_features.push_back(
            {{"type", "Feature"},
             {"geometry", {{"type", "LineString"}, {"coordinates", segment}}},
             {"properties", eprops}});
        segment = json::array({json::array({p.lon_, p.lat_})});
        seg_start = id;
      }
    }
  }
  for (auto& e : edge_features) {
    features.push_back(std::move(e));
  }

  for (auto const& [id, n] : nodes) {
    auto const kind =
        is_transit(n.tags_) ? "transit" : (is_poi(n.tags_) ? "poi" : nullptr);
    if (kind == nullptr) {
      continue;
    }
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "Point"},
           {"coordinates", json::array({n.pos_.lon_, n.pos_.lat_})}}},
         {"properties", {{"kind", kind}, {"osm_id", id}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

void fetch_street_network(bbox_query const& bbox,
                          std::string_view const endpoint,
                          std::filesystem::path const& out,
                          fetch_options const& opt) {
  auto const query = overpass_query(bbox);
  auto const [base, path] = split_url(endpoint);

  auto client = httplib::Client{base};
  client.set_connection_timeout(opt.timeout_);
  client.set_read_timeout(opt.timeout_);
  client.set_follow_location(true);

  auto const params = httplib::Params{{"data", query}};
  auto const target = httplib::append_query_params(path, params);

  auto backoff = opt.initial_backoff_;
  auto last_error = std::string{};
  for (auto attempt = 1; attempt <= opt.attempts_; ++attempt) {
    auto body = std::string{};
    auto oversized = false;
    auto const res = client.Get(
        target, [&](char const* data, std::size_t len) {
          if (body.size() + len > opt.max_bytes_) {
            oversized = true;
            return false;
          }
          body.append(data, len);
          return true;
        });
    if (oversized) {
      fail(error_kind::size_error,
           fmt::format("response from {} exceeds {} bytes", endpoint,
                       opt.max_bytes_));
    }
    if (res && res->status == 200) {
      auto doc = parse_json_with_context(body, "fetched street network");
      if (doc.is_object() && doc.value("type", "") == "FeatureCollection") {
        parse_street_graph(body);  // validates
      } else {
        doc = overpass_to_geojson(doc);
      }
      auto f = std::ofstream{out, std::ios::binary};
      if (!f) {
        fail(error_kind::io_error,
             fmt::format("cannot write '{}'", out.string()));
      }
      f << doc.dump() << '\n';
      return;
    }
    last_error = res ? fmt::format("HTTP {}", res->status)
                     : httplib::to_string(res.error());
    if (attempt < opt.attempts_) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  fail(error_kind::fetch_error,
       fmt::format("fetching {} failed after {} attempts: {}", endpoint,
                   opt.attempts_, last_error));
}

}  // namespace bike::ingest
