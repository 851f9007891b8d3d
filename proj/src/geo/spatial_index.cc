#include "bike/geo/spatial_index.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::geo {

namespace {

// Relative slack on the bounding box so rounding never excludes a point the
// exact haversine test would accept.
constexpr auto kSlack = 1e-9;

}  // namespace

spatial_index::spatial_index(std::span<geo_point const> points,
                             double const cell_deg)
    : points_{points.begin(), points.end()}, cell_deg_{cell_deg} {
  if (!(cell_deg > 0.0) || cell_deg > 90.0) {
    fail(error_kind::invalid_argument,
         fmt::format("spatial index cell size {} out of range", cell_deg));
  }
  ncols_ = static_cast<std::int64_t>(std::ceil(360.0 / cell_deg_));
  nrows_ = static_cast<std::int64_t>(std::ceil(180.0 / cell_deg_)) + 1;

  auto keyed = std::vector<std::pair<std::uint64_t, std::uint32_t>>{};
  keyed.reserve(points_.size());
  for (auto i = std::size_t{0}; i != points_.size(); ++i) {
    if (!is_valid(points_[i])) {
      fail(error_kind::invalid_argument,
           fmt::format("spatial index entry {} has invalid coordinates", i));
    }
    keyed.emplace_back(
        key(col_of(points_[i].lon_), row_of(points_[i].lat_)),
        static_cast<std::uint32_t>(i));
  }
  std::sort(begin(keyed), end(keyed));

  order_.reserve(keyed.size());
  for (auto i = std::size_t{0}; i != keyed.size(); ++i) {
    auto const k = keyed[i].first;
    auto const pos = static_cast<std::uint32_t>(i);
    auto [it, inserted] = cells_.try_emplace(k, range_t{pos, pos + 1});
    if (!inserted) {
      it->second.second = pos + 1;
    }
    order_.push_back(keyed[i].second);
  }
}

std::int64_t spatial_index::col_of(double const lon) const {
  auto const c = static_cast<std::int64_t>(std::floor((lon + 180.0) / cell_deg_));
  return ((c % ncols_) + ncols_) % ncols_;
}

std::int64_t spatial_index::row_of(double const lat) const {
  auto const r = static_cast<std::int64_t>(std::floor((lat + 90.0) / cell_deg_));
  return std::clamp<std::int64_t>(r, 0, nrows_ - 1);
}

std::uint64_t spatial_index::key(std::int64_t const col,
                                 std::int64_t const row) const {
  return static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(ncols_) +
         static_cast<std::uint64_t>(col);
}

void spatial_index::candidate_ranges(geo_point const& center,
                                     double const radius,
                                     std::vector<range_t>& out) const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    fail(error_kind::invalid_argument,
         fmt::format("radius must be positive, got {}", radius));
  }
  if (points_.empty()) {
    return;
  }

  auto const full_scan = [&]() {
    out.clear();
    out.emplace_back(0U, static_cast<std::uint32_t>(order_.size()));
  };

  auto const delta = radius / kEarthRadius * (1.0 + kSlack) + 1e-15;
  auto const phi = to_rad(center.lat_);
  if (delta >= std::numbers::pi / 2.0 - std::abs(phi)) {
    // Cap reaches a pole: every longitude is a candidate.
    full_scan();
    return;
  }

  auto const dlat = to_deg(delta);
  auto const dlon =
      to_deg(std::asin(std::min(1.0, std::sin(delta) / std::cos(phi)))) *
          (1.0 + kSlack) +
      1e-12;

  auto const row_lo = row_of(center.lat_ - dlat);
  auto const row_hi = row_of(center.lat_ + dlat);
  auto const col_lo = static_cast<std::int64_t>(
      std::floor((center.lon_ - dlon + 180.0) / cell_deg_));
  auto const col_hi = static_cast<std::int64_t>(
      std::floor((center.lon_ + dlon + 180.0) / cell_deg_));
  auto const ncols_visit = std::min(col_hi - col_lo + 1, ncols_);
  auto const nrows_visit = row_hi - row_lo + 1;

  if (static_cast<std::size_t>(ncols_visit * nrows_visit) > cells_.size()) {
    full_scan();
    return;
  }

  for (auto r = row_lo; r <= row_hi; ++r) {
    for (auto c = col_lo; c != col_lo + ncols_visit; ++c) {
      auto const wrapped = ((c % ncols_) + ncols_) % ncols_;
      if (auto const it = cells_.find(key(wrapped, r)); it != end(cells_)) {
        out.push_back(it->second);
      }
    }
  }
}

std::vector<std::size_t> spatial_index::points_within(geo_point const& center,
                                                      double const radius) const {
  auto result = std::vector<std::size_t>{};
  for_each_within(center, radius,
                  [&](std::size_t const id, double) { result.push_back(id); });
  std::sort(begin(result), end(result));
  return result;
}

std::optional<std::pair<std::size_t, double>> spatial_index::nearest_within(
    geo_point const& center, double const max_distance) const {
  auto best = std::optional<std::pair<std::size_t, double>>{};
  for_each_within(center, max_distance,
                  [&](std::size_t const id, double const d) {
                    if (!best.has_value() || d < best->second ||
                        (d == best->second && id < best->first)) {
                      best = {id, d};
                    }
                  });
  return best;
}

}  // namespace bike::geo
