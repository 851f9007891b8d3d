#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bike/geo/geo_point.h"
#include "bike/ingest/feature_record.h"
#include "bike/ingest/street_graph.h"

namespace bike::sampling {

struct sample_point {
  friend bool operator==(sample_point const&, sample_point const&) = default;

  std::string id_;
  geo::geo_point location_;
  std::optional<std::string> image_id_;
};

// First n positions of a seeded forward Fisher-Yates shuffle of the graph's
// node list (std::mt19937_64 seeded with `seed`). Point ids are node ids.
// sample(n) is always a prefix of sample(n + k) for the same seed.
// Throws invalid-argument when n exceeds the node count.
std::vector<sample_point> sample_points(ingest::street_graph const& graph,
                                        std::size_t n, std::uint64_t seed);

// Binds each point to its nearest record within max_distance meters
// (ties to the earlier record); otherwise image_id is cleared.
std::vector<sample_point> bind_images(
    std::span<sample_point const> points,
    std::span<ingest::feature_record const> records, double max_distance);

}  // namespace bike::sampling
