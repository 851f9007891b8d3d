#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "doctest.h"
#include "json.hpp"

#include "bike/error.h"
#include "bike/geo/geo_point.h"
#include "bike/random.h"

namespace bike::test {

// Fresh directory under the system temp dir, removed on scope exit.
struct temp_dir {
  temp_dir() {
    static auto counter = std::atomic<int>{0};
    path_ = std::filesystem::temp_directory_path() /
            ("bike_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~temp_dir() {
    auto ec = std::error_code{};
    std::filesystem::remove_all(path_, ec);
  }
  temp_dir(temp_dir const&) = delete;
  temp_dir& operator=(temp_dir const&) = delete;

  std::filesystem::path operator/(std::string_view name) const {
    return path_ / name;
  }

  std::filesystem::path path_;
};

inline void write_file(std::filesystem::path const& p, std::string_view text) {
  auto out = std::ofstream{p, std::ios::binary};
  out << text;
}

inline std::string slurp(std::filesystem::path const& p) {
  auto in = std::ifstream{p, std::ios::binary};
  return {std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
}

// Runs fn and reports the error kind it threw, if any.
template <typename Fn>
std::optional<error_kind> kind_thrown(Fn&& fn) {
  try {
    fn();
  } catch (error const& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline geo::geo_point random_point(rng_t& rng, geo::geo_point const& center,
                                   double half_extent_deg) {
  return {center.lon_ + (2.0 * uniform01(rng) - 1.0) * half_extent_deg,
          center.lat_ + (2.0 * uniform01(rng) - 1.0) * half_extent_deg};
}

inline nlohmann::json node_feature(std::string const& id,
                                   geo::geo_point const& p,
                                   bool signalized = false,
                                   bool calming = false) {
  return {{"type", "Feature"},
          {"geometry", {{"type", "Point"}, {"coordinates", {p.lon_, p.lat_}}}},
          {"properties",
           {{"kind", "node"},
            {"id", id},
            {"signalized", signalized},
            {"traffic_calming", calming}}}};
}

inline nlohmann::json edge_feature(std::string const& id, std::string const& u,
                                   geo::geo_point const& a,
                                   std::string const& v,
                                   geo::geo_point const& b,
                                   nlohmann::json extra = nlohmann::json::object()) {
  auto props = nlohmann::json{{"kind", "edge"}, {"id", id}, {"u", u}, {"v", v}};
  props.update(extra);
  return {{"type", "Feature"},
          {"geometry",
           {{"type", "LineString"},
            {"coordinates", {{a.lon_, a.lat_}, {b.lon_, b.lat_}}}}},
          {"properties", props}};
}

inline nlohmann::json point_feature(std::string const& kind,
                                    geo::geo_point const& p) {
  return {{"type", "Feature"},
          {"geometry", {{"type", "Point"}, {"coordinates", {p.lon_, p.lat_}}}},
          {"properties", {{"kind", kind}}}};
}

inline nlohmann::json collection(nlohmann::json features) {
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

// n x n grid with `spacing` meters between neighbours, nodes "gX_Y" with X
// east and Y north; every edge is residential unless `highway` says otherwise.
inline nlohmann::json grid_geojson(geo::geo_point const& origin, int n,
                                   double spacing,
                                   std::string const& highway = "residential") {
  auto const id = [](int x, int y) {
    return "g" + std::to_string(x) + "_" + std::to_string(y);
  };
  auto const at = [&](int x, int y) {
    return geo::offset(origin, x * spacing, y * spacing);
  };
  auto f = nlohmann::json::array();
  for (auto y = 0; y != n; ++y) {
    for (auto x = 0; x != n; ++x) {
      f.push_back(node_feature(id(x, y), at(x, y)));
    }
  }
  auto k = 0;
  for (auto y = 0; y != n; ++y) {
    for (auto x = 0; x != n; ++x) {
      if (x + 1 < n) {
        f.push_back(edge_feature("e" + std::to_string(k++), id(x, y), at(x, y),
                                 id(x + 1, y), at(x + 1, y),
                                 {{"highway", highway}}));
      }
      if (y + 1 < n) {
        f.push_back(edge_feature("e" + std::to_string(k++), id(x, y), at(x, y),
                                 id(x, y + 1), at(x, y + 1),
                                 {{"highway", highway}}));
      }
    }
  }
  return collection(f);
}

}  // namespace bike::test
