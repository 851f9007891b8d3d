#pragma once

#include <vector>

#include "bike/geo/geo_point.h"

namespace bike::geo {

// Square lattice with spacing `cell` meters on the tangent plane at `center`
// (center is a lattice node), restricted to points whose great-circle
// distance to center is <= radius. Row-major from south-west. Requires
// 0 < cell <= radius, otherwise invalid-argument.
std::vector<geo_point> buffer_grid_samples(geo_point const& center,
                                           double radius, double cell);

}  // namespace bike::geo
