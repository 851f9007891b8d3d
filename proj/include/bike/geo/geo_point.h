#pragma once

#include <cmath>
#include <numbers>

namespace bike::geo {

constexpr auto kEarthRadius = 6'371'000.0;  // meters, spherical model

struct geo_point {
  friend bool operator==(geo_point const&, geo_point const&) = default;

  double lon_{0.0};
  double lat_{0.0};
};

constexpr double to_rad(double const deg) {
  return deg * std::numbers::pi / 180.0;
}
constexpr double to_deg(double const rad) {
  return rad * 180.0 / std::numbers::pi;
}

bool is_valid(geo_point const&);

// Throws invalid-argument when a coordinate is non-finite or out of range.
geo_point make_point(double lon, double lat);

// Great-circle distance in meters on a sphere of radius kEarthRadius.
double haversine_distance(geo_point const& a, geo_point const& b);

// Moves `origin` by (east, north) meters on the local tangent plane.
geo_point offset(geo_point const& origin, double east_m, double north_m);

}  // namespace bike::geo
