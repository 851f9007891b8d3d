#include "bike/geo/buffer_grid.h"

#include <cmath>

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::geo {

std::vector<geo_point> buffer_grid_samples(geo_point const& center,
                                           double const radius,
                                           double const cell) {
  if (!(cell > 0.0) || !(radius > 0.0) || cell > radius) {
    fail(error_kind::invalid_argument,
         fmt::format("buffer grid needs 0 < cell <= radius, got cell={} "
                     "radius={}",
                     cell, radius));
  }
  auto const steps = static_cast<int>(std::floor(radius / cell)) + 1;
  auto out = std::vector<geo_point>{};
  out.reserve(static_cast<std::size_t>(4 * steps * steps));
  for (auto j = -steps; j <= steps; ++j) {
    for (auto i = -steps; i <= steps; ++i) {
      auto const p = offset(center, i * cell, j * cell);
      if (haversine_distance(center, p) <= radius) {
        out.push_back(p);
      }
    }
  }
  return out;
}

}  // namespace bike::geo
