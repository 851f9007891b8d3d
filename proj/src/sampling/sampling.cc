#include "bike/sampling/sampling.h"

#include <numeric>

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/geo/spatial_index.h"
#include "bike/random.h"

namespace bike::sampling {

std::vector<sample_point> sample_points(ingest::street_graph const& graph,
                                        std::size_t const n,
                                        std::uint64_t const seed) {
  if (n > graph.node_count()) {
    fail(error_kind::invalid_argument,
         fmt::format("cannot sample {} points from {} nodes", n,
                     graph.node_count()));
  }
  auto order = std::vector<std::size_t>(graph.node_count());
  std::iota(begin(order), end(order), std::size_t{0});
  auto rng = rng_t{seed};
  partial_shuffle(std::span{order}, n, rng);

  auto out = std::vector<sample_point>{};
  out.reserve(n);
  for (auto i = std::size_t{0}; i != n; ++i) {
    auto const& node = graph.nodes_[order[i]];
    out.push_back({node.id_, node.location_, std::nullopt});
  }
  return out;
}

std::vector<sample_point> bind_images(
    std::span<sample_point const> points,
    std::span<ingest::feature_record const> records,
    double const max_distance) {
  if (!(max_distance > 0.0)) {
    fail(error_kind::invalid_argument,
         fmt::format("max_distance must be positive, got {}", max_distance));
  }
  auto locations = std::vector<geo::geo_point>{};
  locations.reserve(records.size());
  for (auto const& r : records) {
    locations.push_back(r.location_);
  }
  auto const index = geo::spatial_index{locations};

  auto out = std::vector<sample_point>{points.begin(), points.end()};
  for (auto& p : out) {
    auto const nearest = index.nearest_within(p.location_, max_distance);
    p.image_id_ = nearest.has_value()
                      ? std::optional{records[nearest->first].image_id_}
                      : std::nullopt;
  }
  return out;
}

}  // namespace bike::sampling
