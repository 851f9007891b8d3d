#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bike/geo/spatial_index.h"
#include "bike/indicators/registry.h"
#include "bike/ingest/aqi.h"
#include "bike/ingest/dem.h"
#include "bike/ingest/feature_record.h"
#include "bike/ingest/land_use.h"
#include "bike/ingest/street_graph.h"
#include "bike/sampling/sampling.h"

namespace bike::indicators {

// ---- individual extraction rules -------------------------------------------

struct connectivity {
  friend bool operator==(connectivity const&, connectivity const&) = default;

  std::size_t signalized_{0};    // degree >= 3 with signal flag
  std::size_t unsignalized_{0};  // degree >= 3 without signal flag
  std::size_t culdesacs_{0};     // degree == 1
};

// `nodes` indexes graph.nodes_ by position.
connectivity connectivity_counts(geo::geo_point const& p,
                                 ingest::street_graph const& graph,
                                 geo::spatial_index const& nodes,
                                 double radius);

// Horn's 3x3 gradient at the nearest cell; degrees. nullopt when the point is
// outside the grid, on its border row/column, or next to a nodata cell.
std::optional<double> slope_at(geo::geo_point const& p,
                               ingest::dem_grid const& dem);

std::size_t count_within(geo::geo_point const& p,
                         geo::spatial_index const& layer, double radius);

// Normalised Shannon entropy over the three land-use classes, estimated on
// buffer_grid_samples(p, radius, cell). A sample covered by overlapping
// polygons takes the first polygon's class. No classified sample -> 0.
double landuse_mix(geo::geo_point const& p, ingest::land_use_dataset const& lu,
                   double radius, double cell);

// Inverse-distance weighting with haversine distance. A station within
// `epsilon` meters returns its own value (nearest such station).
// No stations -> configuration-error.
double aqi_at(geo::geo_point const& p,
              std::span<ingest::aqi_station const> stations, double power = 2.0,
              double epsilon = 1.0);

struct scenery {
  double greenery_{0.0};
  double buildings_{0.0};
  double water_{0.0};
};
std::optional<scenery> scenery_fractions(ingest::feature_record const* record);

// Edges with at least one endpoint within radius, ascending edge index.
std::vector<std::size_t> edges_near(geo::geo_point const& p,
                                    ingest::street_graph const& graph,
                                    geo::spatial_index const& nodes,
                                    double radius);

// Mean categorical score of highway classes over nearby edges.
std::optional<double> road_type_score(geo::geo_point const& p,
                                      ingest::street_graph const& graph,
                                      geo::spatial_index const& nodes,
                                      double radius,
                                      scaling::scaling_rule const& rule);

// As road_type_score over surface tags; untagged edges are skipped.
std::optional<double> pavement_score(geo::geo_point const& p,
                                     ingest::street_graph const& graph,
                                     geo::spatial_index const& nodes,
                                     double radius,
                                     scaling::scaling_rule const& rule);

// Mean width (meters) of nearby edges carrying a width tag.
std::optional<double> mean_road_width(geo::geo_point const& p,
                                      ingest::street_graph const& graph,
                                      geo::spatial_index const& nodes,
                                      double radius);
std::optional<double> road_width_score(geo::geo_point const& p,
                                       ingest::street_graph const& graph,
                                       geo::spatial_index const& nodes,
                                       double radius);

bool seg_present(ingest::feature_record const& r, std::string_view cls,
                 double threshold);

// Nine scored presence indicators, inversion applied (potholes and utility
// poles score 1 when absent).
struct svi_presence {
  double potholes_{0.0};
  double street_light_{0.0};
  double bike_lane_{0.0};
  double street_amenity_{0.0};
  double utility_pole_{0.0};
  double bike_parking_{0.0};
  double sidewalk_{0.0};
  double crosswalk_{0.0};
  double curb_cut_{0.0};
};
std::optional<svi_presence> svi_presence_indicators(
    ingest::feature_record const* record, double threshold = 0.0);

// Sum of car, bus, truck and motorcycle counts over records within radius;
// nullopt when no record lies in the buffer.
std::optional<std::int64_t> vehicle_count_buffer(
    geo::geo_point const& p, std::span<ingest::feature_record const> records,
    geo::spatial_index const& record_index, double radius);

struct vci {
  double onstreet_parking_{1.0};               // 1 when no parking nearby
  std::optional<double> traffic_control_;      // from the bound record
  double speed_control_{0.0};                  // 1 when calming nearby
};
vci vci_flags(geo::geo_point const& p, ingest::street_graph const& graph,
              geo::spatial_index const& nodes,
              ingest::feature_record const* record, double radius,
              double threshold = 0.0);

// ---- per-point raw extraction ----------------------------------------------

struct extraction_params {
  double idw_power_{2.0};
  double idw_epsilon_{1.0};
  double landuse_cell_{25.0};
  double presence_threshold_{0.0};
};

// Raw 0-10 perception scores per image, one slot per dimension.
using perception_table =
    std::unordered_map<std::string, std::array<std::optional<double>, 7>>;

// Immutable datasets of one city plus the spatial indexes built over them.
// Optional datasets may be null; indicators depending on them are missing.
class extraction_context {
public:
  extraction_context(ingest::street_graph const* graph,
                     ingest::land_use_dataset const* land_use,
                     ingest::dem_grid const* dem,
                     std::span<ingest::aqi_station const> stations,
                     std::span<ingest::feature_record const> records,
                     perception_table const* perception,
                     extraction_params params = {});

  ingest::feature_record const* record(
      std::optional<std::string> const& image_id) const;

  // Raw value of every registry entry for `p`, index-aligned with specs_.
  std::vector<std::optional<double>> extract_raw(
      sampling::sample_point const& p, registry const& reg) const;

  std::optional<double> extract_one(sampling::sample_point const& p,
                                    indicator_spec const& spec) const;

private:
  ingest::street_graph const* graph_;
  ingest::land_use_dataset const* land_use_;
  ingest::dem_grid const* dem_;
  std::span<ingest::aqi_station const> stations_;
  std::span<ingest::feature_record const> records_;
  perception_table const* perception_;
  extraction_params params_;

  geo::spatial_index nodes_;
  geo::spatial_index pois_;
  geo::spatial_index transit_;
  geo::spatial_index record_index_;
  std::unordered_map<std::string, std::size_t> record_by_id_;
};

}  // namespace bike::indicators
