#pragma once

#include <vector>

#include "bike/geo/geo_point.h"

namespace bike::geo {

struct bbox {
  bool contains(geo_point const& p) const {
    return p.lon_ >= min_.lon_ && p.lon_ <= max_.lon_ && p.lat_ >= min_.lat_ &&
           p.lat_ <= max_.lat_;
  }
  bool intersects(bbox const& o) const {
    return !(o.min_.lon_ > max_.lon_ || o.max_.lon_ < min_.lon_ ||
             o.min_.lat_ > max_.lat_ || o.max_.lat_ < min_.lat_);
  }

  geo_point min_;
  geo_point max_;
};

using ring = std::vector<geo_point>;

// Closed rings in lon/lat treated as planar for containment. Construction
// closes open rings and rejects rings with fewer than 3 distinct vertices
// (invalid-geometry).
class polygon {
public:
  polygon(ring outer, std::vector<ring> holes = {});

  ring const& outer() const { return outer_; }
  std::vector<ring> const& holes() const { return holes_; }
  bbox const& bounds() const { return bounds_; }

private:
  ring outer_;
  std::vector<ring> holes_;
  bbox bounds_;
};

// Even-odd rule over all rings, so points inside a hole are outside.
bool point_in_polygon(geo_point const& pt, polygon const& poly);

}  // namespace bike::geo
