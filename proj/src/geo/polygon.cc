#include "bike/geo/polygon.h"

#include <algorithm>
#include <set>
#include <utility>

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::geo {

namespace {

void close_and_check(ring& r) {
  auto distinct = std::set<std::pair<double, double>>{};
  for (auto const& p : r) {
    if (!is_valid(p)) {
      fail(error_kind::invalid_geometry,
           fmt::format("ring vertex out of range: ({}, {})", p.lon_, p.lat_));
    }
    distinct.emplace(p.lon_, p.lat_);
  }
  if (distinct.size() < 3) {
    fail(error_kind::invalid_geometry,
         fmt::format("ring has {} distinct vertices, need at least 3",
                     distinct.size()));
  }
  if (r.front() != r.back()) {
    r.push_back(r.front());
  }
}

bool crosses_odd(geo_point const& pt, ring const& r) {
  auto inside = false;
  for (auto i = std::size_t{0}, j = r.size() - 1; i < r.size(); j = i++) {
    auto const& a = r[i];
    auto const& b = r[j];
    if ((a.lat_ > pt.lat_) != (b.lat_ > pt.lat_)) {
      auto const x =
          a.lon_ + (pt.lat_ - a.lat_) * (b.lon_ - a.lon_) / (b.lat_ - a.lat_);
      if (pt.lon_ < x) {
        inside = !inside;
      }
    }
  }
  return inside;
}

}  // namespace

polygon::polygon(ring outer, std::vector<ring> holes)
    : outer_{std::move(outer)}, holes_{std::move(holes)} {
  close_and_check(outer_);
  for (auto& h : holes_) {
    close_and_check(h);
  }
  auto const [lon_lo, lon_hi] = std::minmax_element(
      begin(outer_), end(outer_),
      [](auto const& a, auto const& b) { return a.lon_ < b.lon_; });
  auto const [lat_lo, lat_hi] = std::minmax_element(
      begin(outer_), end(outer_),
      [](auto const& a, auto const& b) { return a.lat_ < b.lat_; });
  bounds_ = {{lon_lo->lon_, lat_lo->lat_}, {lon_hi->lon_, lat_hi->lat_}};
}

bool point_in_polygon(geo_point const& pt, polygon const& poly) {
  if (!poly.bounds().contains(pt)) {
    return false;
  }
  auto inside = crosses_odd(pt, poly.outer());
  for (auto const& h : poly.holes()) {
    inside ^= crosses_odd(pt, h);
  }
  return inside;
}

}  // namespace bike::geo
