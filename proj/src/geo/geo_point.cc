#include "bike/geo/geo_point.h"

#include <algorithm>

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::geo {

bool is_valid(geo_point const& p) {
  return std::isfinite(p.lon_) && std::isfinite(p.lat_) && p.lon_ >= -180.0 &&
         p.lon_ <= 180.0 && p.lat_ >= -90.0 && p.lat_ <= 90.0;
}

geo_point make_point(double const lon, double const lat) {
  auto const p = geo_point{lon, lat};
  if (!is_valid(p)) {
    fail(error_kind::invalid_argument,
         fmt::format("coordinate out of range: lon={} lat={}", lon, lat));
  }
  return p;
}

double haversine_distance(geo_point const& a, geo_point const& b) {
  auto const phi1 = to_rad(a.lat_);
  auto const phi2 = to_rad(b.lat_);
  auto const s_phi = std::sin((phi2 - phi1) / 2.0);
  auto const s_lambda = std::sin(to_rad(b.lon_ - a.lon_) / 2.0);
  auto const h = s_phi * s_phi + std::cos(phi1) * std::cos(phi2) * s_lambda *
                                     s_lambda;
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(h)));
}

geo_point offset(geo_point const& origin, double const east_m,
                 double const north_m) {
  auto const lat = origin.lat_ + to_deg(north_m / kEarthRadius);
  auto const lon =
      origin.lon_ +
      to_deg(east_m / (kEarthRadius * std::cos(to_rad(origin.lat_))));
  return {lon, lat};
}

}  // namespace bike::geo
