#include "bike/indicators/extract.h"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/geo/buffer_grid.h"
#include "bike/geo/polygon.h"

namespace bike::indicators {

namespace seg = ingest::seg;

connectivity connectivity_counts(geo::geo_point const& p,
                                 ingest::street_graph const& graph,
                                 geo::spatial_index const& nodes,
                                 double const radius) {
  auto c = connectivity{};
  nodes.for_each_within(p, radius, [&](std::size_t const id, double) {
    auto const deg = graph.degree(id);
    if (deg >= 3) {
      (graph.nodes_[id].signalized_ ? c.signalized_ : c.unsignalized_) += 1;
    } else if (deg == 1) {
      ++c.culdesacs_;
    }
  });
  return c;
}

std::optional<double> slope_at(geo::geo_point const& p,
                               ingest::dem_grid const& dem) {
  auto const cs = dem.cell_size_;
  auto const fx = (p.lon_ - dem.origin_.lon_) / cs;
  auto const fy = (p.lat_ - dem.origin_.lat_) / cs;
  if (fx < -0.5 || fy < -0.5 || fx > dem.ncols_ - 0.5 ||
      fy > dem.nrows_ - 0.5) {
    return std::nullopt;
  }
  auto const col = static_cast<int>(std::lround(fx));
  auto const row = dem.nrows_ - 1 - static_cast<int>(std::lround(fy));
  if (col < 1 || row < 1 || col > dem.ncols_ - 2 || row > dem.nrows_ - 2) {
    return std::nullopt;
  }

  // a b c / d e f / g h i with the top row to the north.
  double z[3][3];
  for (auto dr = -1; dr <= 1; ++dr) {
    for (auto dc = -1; dc <= 1; ++dc) {
      auto const v = dem.value(col + dc, row + dr);
      if (dem.is_nodata(v) || !std::isfinite(v)) {
        return std::nullopt;
      }
      z[dr + 1][dc + 1] = v;
    }
  }
  auto const lat = dem.cell_center(col, row).lat_;
  auto const dy = geo::to_rad(cs) * geo::kEarthRadius;
  auto const dx = dy * std::cos(geo::to_rad(lat));
  auto const dzdx = ((z[0][2] + 2 * z[1][2] + z[2][2]) -
                     (z[0][0] + 2 * z[1][0] + z[2][0])) /
                    (8.0 * dx);
  auto const dzdy = ((z[0][0] + 2 * z[0][1] + z[0][2]) -
                     (z[2][0] + 2 * z[2][1] + z[2][2])) /
                    (8.0 * dy);
  return geo::to_deg(std::atan(std::hypot(dzdx, dzdy)));
}

std::size_t count_within(geo::geo_point const& p,
                         geo::spatial_index const& layer, double const radius) {
  auto n = std::size_t{0};
  layer.for_each_within(p, radius, [&](std::size_t, double) { ++n; });
  return n;
}

double landuse_mix(geo::geo_point const& p,
                   ingest::land_use_dataset const& lu, double const radius,
                   double const cell) {
  auto const samples = geo::buffer_grid_samples(p, radius, cell);
  if (samples.empty()) {
    return 0.0;
  }
  auto box = geo::bbox{samples.front(), samples.front()};
  for (auto const& s : samples) {
    box.min_ = {std::min(box.min_.lon_, s.lon_), std::min(box.min_.lat_, s.lat_)};
    box.max_ = {std::max(box.max_.lon_, s.lon_), std::max(box.max_.lat_, s.lat_)};
  }
  auto candidates = std::vector<ingest::land_use_polygon const*>{};
  for (auto const& poly : lu.polygons_) {
    if (poly.geometry_.bounds().intersects(box)) {
      candidates.push_back(&poly);
    }
  }
  if (candidates.empty()) {
    return 0.0;
  }

  auto counts = std::array<std::size_t, ingest::kLandUseCategories>{};
  auto total = std::size_t{0};
  for (auto const& s : samples) {
    for (auto const* poly : candidates) {
      if (geo::point_in_polygon(s, poly->geometry_)) {
        ++counts[static_cast<std::size_t>(poly->category_)];
        ++total;
        break;
      }
    }
  }
  if (total == 0) {
    return 0.0;
  }
  auto h = 0.0;
  for (auto const c : counts) {
    if (c != 0) {
      auto const share = static_cast<double>(c) / static_cast<double>(total);
      h -= share * std::log(share);
    }
  }
  return h / std::log(static_cast<double>(ingest::kLandUseCategories));
}

double aqi_at(geo::geo_point const& p,
              std::span<ingest::aqi_station const> stations,
              double const power, double const epsilon) {
  if (stations.empty()) {
    fail(error_kind::configuration_error,
         "air quality interpolation needs at least one station");
  }
  auto nearest = std::optional<std::pair<double, double>>{};  // (d, value)
  auto num = 0.0;
  auto den = 0.0;
  for (auto const& s : stations) {
    auto const d = geo::haversine_distance(p, s.location_);
    if (d <= epsilon && (!nearest.has_value() || d < nearest->first)) {
      nearest = {d, s.annual_mean_};
    }
    auto const w = 1.0 / std::pow(d, power);
    num += s.annual_mean_ * w;
    den += w;
  }
  if (nearest.has_value()) {
    return nearest->second;
  }
  return num / den;
}

std::optional<scenery> scenery_fractions(ingest::feature_record const* r) {
  if (r == nullptr) {
    return std::nullopt;
  }
  return scenery{r->seg(seg::kGreenery), r->seg(seg::kBuilding),
                 r->seg(seg::kWater)};
}

std::vector<std::size_t> edges_near(geo::geo_point const& p,
                                    ingest::street_graph const& graph,
                                    geo::spatial_index const& nodes,
                                    double const radius) {
  auto out = std::vector<std::size_t>{};
  nodes.for_each_within(p, radius, [&](std::size_t const id, double) {
    auto const& adj = graph.adjacency_[id];
    out.insert(end(out), begin(adj), end(adj));
  });
  std::sort(begin(out), end(out));
  out.erase(std::unique(begin(out), end(out)), end(out));
  return out;
}

namespace {

template <typename Fn>
std::optional<double> mean_over_edges(geo::geo_point const& p,
                                      ingest::street_graph const& graph,
                                      geo::spatial_index const& nodes,
                                      double const radius, Fn&& value_of) {
  auto sum = 0.0;
  auto n = 0U;
  for (auto const e : edges_near(p, graph, nodes, radius)) {
    if (auto const v = value_of(graph.edges_[e]); v.has_value()) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0U) {
    return std::nullopt;
  }
  return sum / n;
}

}  // namespace

std::optional<double> road_type_score(geo::geo_point const& p,
                                      ingest::street_graph const& graph,
                                      geo::spatial_index const& nodes,
                                      double const radius,
                                      scaling::scaling_rule const& rule) {
  return mean_over_edges(p, graph, nodes, radius,
                         [&](ingest::graph_edge const& e) {
                           return std::optional{
                               scaling::categorical_score(e.highway_, rule)};
                         });
}

std::optional<double> pavement_score(geo::geo_point const& p,
                                     ingest::street_graph const& graph,
                                     geo::spatial_index const& nodes,
                                     double const radius,
                                     scaling::scaling_rule const& rule) {
  return mean_over_edges(
      p, graph, nodes, radius,
      [&](ingest::graph_edge const& e) -> std::optional<double> {
        if (!e.surface_.has_value()) {
          return std::nullopt;
        }
        return scaling::categorical_score(*e.surface_, rule);
      });
}

std::optional<double> mean_road_width(geo::geo_point const& p,
                                      ingest::street_graph const& graph,
                                      geo::spatial_index const& nodes,
                                      double const radius) {
  return mean_over_edges(p, graph, nodes, radius,
                         [](ingest::graph_edge const& e) { return e.width_; });
}

std::optional<double> road_width_score(geo::geo_point const& p,
                                       ingest::street_graph const& graph,
                                       geo::spatial_index const& nodes,
                                       double const radius) {
  auto const w = mean_road_width(p, graph, nodes, radius);
  if (!w.has_value()) {
    return std::nullopt;
  }
  return scaling::width_score(*w);
}

bool seg_present(ingest::feature_record const& r, std::string_view const cls,
                 double const threshold) {
  return r.seg(cls) > threshold;
}

std::optional<svi_presence> svi_presence_indicators(
    ingest::feature_record const* r, double const threshold) {
  if (r == nullptr) {
    return std::nullopt;
  }
  auto const score = [&](std::string_view const cls, bool const invert) {
    return scaling::presence_score(seg_present(*r, cls, threshold), invert);
  };
  return svi_presence{score(seg::kPothole, true),
                      score(seg::kStreetLight, false),
                      score(seg::kBikeLane, false),
                      score(seg::kStreetAmenity, false),
                      score(seg::kUtilityPole, true),
                      score(seg::kBikeParking, false),
                      score(seg::kSidewalk, false),
                      score(seg::kCrosswalk, false),
                      score(seg::kCurbCut, false)};
}

std::optional<std::int64_t> vehicle_count_buffer(
    geo::geo_point const& p, std::span<ingest::feature_record const> records,
    geo::spatial_index const& record_index, double const radius) {
  auto any = false;
  auto total = std::int64_t{0};
  record_index.for_each_within(p, radius, [&](std::size_t const id, double) {
    auto const& r = records[id];
    any = true;
    total += r.count("car") + r.count("bus") + r.count("truck") +
             r.count("motorcycle");
  });
  if (!any) {
    return std::nullopt;
  }
  return total;
}

namespace {

bool parking_near(geo::geo_point const& p, ingest::street_graph const& graph,
                  geo::spatial_index const& nodes, double const radius) {
  auto const edges = edges_near(p, graph, nodes, radius);
  return std::any_of(begin(edges), end(edges), [&](std::size_t const e) {
    return graph.edges_[e].onstreet_parking_;
  });
}

bool calming_near(geo::geo_point const& p, ingest::street_graph const& graph,
                  geo::spatial_index const& nodes, double const radius) {
  auto found = false;
  nodes.for_each_within(p, radius, [&](std::size_t const id, double) {
    found = found || graph.nodes_[id].traffic_calming_;
  });
  return found;
}

bool traffic_control_present(ingest::feature_record const& r,
                             double const threshold) {
  return seg_present(r, seg::kTrafficLight, threshold) ||
         seg_present(r, seg::kStopSign, threshold);
}

}  // namespace

vci vci_flags(geo::geo_point const& p, ingest::street_graph const& graph,
              geo::spatial_index const& nodes,
              ingest::feature_record const* record, double const radius,
              double const threshold) {
  auto v = vci{};
  v.onstreet_parking_ =
      scaling::presence_score(parking_near(p, graph, nodes, radius), true);
  v.speed_control_ =
      scaling::presence_score(calming_near(p, graph, nodes, radius), false);
  if (record != nullptr) {
    v.traffic_control_ = scaling::presence_score(
        traffic_control_present(*record, threshold), false);
  }
  return v;
}

// ---- extraction_context ----------------------------------------------------

namespace {

std::vector<geo::geo_point> node_locations(ingest::street_graph const* g) {
  auto out = std::vector<geo::geo_point>{};
  if (g != nullptr) {
    out.reserve(g->nodes_.size());
    for (auto const& n : g->nodes_) {
      out.push_back(n.location_);
    }
  }
  return out;
}

}  // namespace

extraction_context::extraction_context(
    ingest::street_graph const* graph, ingest::land_use_dataset const* land_use,
    ingest::dem_grid const* dem, std::span<ingest::aqi_station const> stations,
    std::span<ingest::feature_record const> records,
    perception_table const* perception, extraction_params params)
    : graph_{graph},
      land_use_{land_use},
      dem_{dem},
      stations_{stations},
      records_{records},
      perception_{perception},
      params_{params},
      nodes_{node_locations(graph)},
      pois_{graph != nullptr ? geo::spatial_index{graph->pois_}
                             : geo::spatial_index{}},
      transit_{graph != nullptr ? geo::spatial_index{graph->transit_stops_}
                                : geo::spatial_index{}} {
  auto locs = std::vector<geo::geo_point>{};
  locs.reserve(records.size());
  for (auto i = std::size_t{0}; i != records.size(); ++i) {
    locs.push_back(records[i].location_);
    record_by_id_.emplace(records[i].image_id_, i);
  }
  record_index_ = geo::spatial_index{locs};
}

ingest::feature_record const* extraction_context::record(
    std::optional<std::string> const& image_id) const {
  if (!image_id.has_value()) {
    return nullptr;
  }
  auto const it = record_by_id_.find(*image_id);
  return it == end(record_by_id_) ? nullptr : &records_[it->second];
}

std::optional<double> extraction_context::extract_one(
    sampling::sample_point const& p, indicator_spec const& spec) const {
  using e = extraction;
  auto const& loc = p.location_;
  auto const* rec = record(p.image_id_);
  auto const presence = [&](std::string_view const cls)
      -> std::optional<double> {
    if (rec == nullptr) {
      return std::nullopt;
    }
    return seg_present(*rec, cls, params_.presence_threshold_) ? 1.0 : 0.0;
  };

  if (auto const dim = perception_dimension(spec.extraction_);
      dim.has_value()) {
    if (perception_ == nullptr || !p.image_id_.has_value()) {
      return std::nullopt;
    }
    auto const it = perception_->find(*p.image_id_);
    if (it == end(*perception_)) {
      return std::nullopt;
    }
    return it->second[static_cast<std::size_t>(*dim)];
  }

  auto const needs_graph = [&]() { return graph_ != nullptr; };
  auto const r = spec.radius_;

  switch (spec.extraction_) {
    case e::signalized_intersections:
      if (!needs_graph()) return std::nullopt;
      return static_cast<double>(
          connectivity_counts(loc, *graph_, nodes_, r).signalized_);
    case e::unsignalized_intersections:
      if (!needs_graph()) return std::nullopt;
      return static_cast<double>(
          connectivity_counts(loc, *graph_, nodes_, r).unsignalized_);
    case e::culdesacs:
      if (!needs_graph()) return std::nullopt;
      return static_cast<double>(
          connectivity_counts(loc, *graph_, nodes_, r).culdesacs_);
    case e::slope:
      if (dem_ == nullptr) return std::nullopt;
      return slope_at(loc, *dem_);
    case e::poi_count:
      if (!needs_graph()) return std::nullopt;
      return static_cast<double>(count_within(loc, pois_, r));
    case e::landuse_mix:
      if (land_use_ == nullptr) return std::nullopt;
      return landuse_mix(loc, *land_use_, r, params_.landuse_cell_);
    case e::air_quality:
      if (stations_.empty()) return std::nullopt;
      return aqi_at(loc, stations_, params_.idw_power_, params_.idw_epsilon_);
    case e::greenery:
      if (rec == nullptr) return std::nullopt;
      return rec->seg(seg::kGreenery);
    case e::buildings:
      if (rec == nullptr) return std::nullopt;
      return rec->seg(seg::kBuilding);
    case e::water:
      if (rec == nullptr) return std::nullopt;
      return rec->seg(seg::kWater);
    case e::road_type:
      if (!needs_graph()) return std::nullopt;
      return road_type_score(loc, *graph_, nodes_, r, spec.scaling_);
    case e::pavement:
      if (!needs_graph()) return std::nullopt;
      return pavement_score(loc, *graph_, nodes_, r, spec.scaling_);
    case e::road_width:
      if (!needs_graph()) return std::nullopt;
      return mean_road_width(loc, *graph_, nodes_, r);
    case e::transit_count:
      if (!needs_graph()) return std::nullopt;
      return static_cast<double>(count_within(loc, transit_, r));
    case e::potholes: return presence(seg::kPothole);
    case e::street_light: return presence(seg::kStreetLight);
    case e::bike_lane: return presence(seg::kBikeLane);
    case e::street_amenity: return presence(seg::kStreetAmenity);
    case e::utility_pole: return presence(seg::kUtilityPole);
    case e::bike_parking: return presence(seg::kBikeParking);
    case e::sidewalk: return presence(seg::kSidewalk);
    case e::crosswalk: return presence(seg::kCrosswalk);
    case e::curb_cut: return presence(seg::kCurbCut);
    case e::vehicle_count: {
      auto const n = vehicle_count_buffer(loc, records_, record_index_, r);
      if (!n.has_value()) return std::nullopt;
      return static_cast<double>(*n);
    }
    case e::onstreet_parking:
      if (!needs_graph()) return std::nullopt;
      return parking_near(loc, *graph_, nodes_, r) ? 1.0 : 0.0;
    case e::traffic_control:
      if (rec == nullptr) return std::nullopt;
      return traffic_control_present(*rec, params_.presence_threshold_) ? 1.0
                                                                        : 0.0;
    case e::speed_control:
      if (!needs_graph()) return std::nullopt;
      return calming_near(loc, *graph_, nodes_, r) ? 1.0 : 0.0;
    default: break;
  }
  fail(error_kind::configuration_error,
       fmt::format("no extraction for '{}'", to_string(spec.extraction_)));
}

std::vector<std::optional<double>> extraction_context::extract_raw(
    sampling::sample_point const& p, registry const& reg) const {
  auto out = std::vector<std::optional<double>>{};
  out.reserve(reg.size());
  for (auto const& spec : reg.specs_) {
    out.push_back(extract_one(p, spec));
  }
  return out;
}

}  // namespace bike::indicators
