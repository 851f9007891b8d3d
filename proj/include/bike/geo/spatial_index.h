#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bike/geo/geo_point.h"

namespace bike::geo {

// Uniform lat/lon grid bucketing over points identified by their position in
// the construction span. Immutable after construction; queries are
// thread-safe. Results match a linear haversine scan exactly (boundary
// inclusive).
class spatial_index {
public:
  using range_t = std::pair<std::uint32_t, std::uint32_t>;

  spatial_index() = default;
  explicit spatial_index(std::span<geo_point const> points,
                         double cell_deg = 0.01);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  geo_point const& point(std::size_t const id) const { return points_[id]; }

  // Ids with haversine_distance(center, p) <= radius, ascending.
  // Throws invalid-argument for radius <= 0.
  std::vector<std::size_t> points_within(geo_point const& center,
                                         double radius) const;

  // Calls fn(id, distance) for every id within radius, unspecified order.
  template <typename Fn>
  void for_each_within(geo_point const& center, double const radius,
                       Fn&& fn) const {
    auto ranges = std::vector<range_t>{};
    candidate_ranges(center, radius, ranges);
    for (auto const& [from, to] : ranges) {
      for (auto i = from; i != to; ++i) {
        auto const id = order_[i];
        auto const d = haversine_distance(center, points_[id]);
        if (d <= radius) {
          fn(id, d);
        }
      }
    }
  }

  // Nearest id within max_distance; ties resolved to the lower id.
  std::optional<std::pair<std::size_t, double>> nearest_within(
      geo_point const& center, double max_distance) const;

private:
  void candidate_ranges(geo_point const& center, double radius,
                        std::vector<range_t>& out) const;
  std::int64_t col_of(double lon) const;
  std::int64_t row_of(double lat) const;
  std::uint64_t key(std::int64_t col, std::int64_t row) const;

  std::vector<geo_point> points_;
  double cell_deg_{0.01};
  std::int64_t ncols_{0};
  std::int64_t nrows_{0};
  std::vector<std::uint32_t> order_;  // ids grouped by cell
  std::unordered_map<std::uint64_t, range_t> cells_;
};

}  // namespace bike::geo
