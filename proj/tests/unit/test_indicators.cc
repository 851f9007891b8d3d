#include <cmath>
#include <numbers>
#include <set>

#include "support.h"

#include "bike/geo/buffer_grid.h"
#include "bike/geo/spatial_index.h"
#include "bike/indicators/assemble.h"
#include "bike/indicators/extract.h"
#include "bike/sampling/sampling.h"

using namespace bike;
using namespace bike::indicators;
using bike::geo::geo_point;
using nlohmann::json;

namespace {

auto const kOrigin = geo_point{103.8, 1.3};

std::vector<geo_point> locations(ingest::street_graph const& g) {
  auto out = std::vector<geo_point>{};
  for (auto const& n : g.nodes_) {
    out.push_back(n.location_);
  }
  return out;
}

ingest::feature_record record(std::string id, geo_point p,
                              json seg = json::object(),
                              json counts = json::object()) {
  return ingest::parse_feature_record({{"image_id", std::move(id)},
                                       {"location", {{"lon", p.lon_}, {"lat", p.lat_}}},
                                       {"seg_fraction", std::move(seg)},
                                       {"object_count", std::move(counts)}});
}

// Two-node street "a"-"b" 200 m long with the given edge tags.
ingest::street_graph street(json tags, bool calming_b = false) {
  auto const a = kOrigin;
  auto const b = geo::offset(kOrigin, 200, 0);
  return ingest::parse_street_graph(
      test::collection({test::node_feature("a", a),
                        test::node_feature("b", b, false, calming_b),
                        test::edge_feature("ab", "a", a, "b", b, tags)})
          .dump());
}

ingest::land_use_dataset tiny_squares(
    std::vector<std::pair<geo_point, std::string>> const& cells) {
  auto features = json::array();
  auto const h = 1e-7;
  for (auto const& [p, cat] : cells) {
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "Polygon"},
           {"coordinates",
            {{{p.lon_ - h, p.lat_ - h},
              {p.lon_ + h, p.lat_ - h},
              {p.lon_ + h, p.lat_ + h},
              {p.lon_ - h, p.lat_ + h},
              {p.lon_ - h, p.lat_ - h}}}}}},
         {"properties", {{"category", cat}}}});
  }
  return ingest::parse_land_use(test::collection(features).dump());
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("sample_points") {
  auto const g =
      ingest::parse_street_graph(test::grid_geojson(kOrigin, 4, 300).dump());
  auto const all = sampling::sample_points(g, 16, 42);
  CHECK(all.size() == 16U);
  auto ids = std::set<std::string>{};
  for (auto const& p : all) {
    ids.insert(p.id_);
  }
  CHECK(ids.size() == 16U);
  CHECK(sampling::sample_points(g, 16, 42) == all);
  CHECK(sampling::sample_points(g, 0, 42).empty());

  auto const five = sampling::sample_points(g, 5, 42);
  CHECK(std::equal(five.begin(), five.end(), all.begin()));
  CHECK(test::kind_thrown([&] { sampling::sample_points(g, 17, 1); }) ==
        error_kind::invalid_argument);
}

TEST_CASE("sample_points: seeds give different draws") {
  auto const g =
      ingest::parse_street_graph(test::grid_geojson(kOrigin, 32, 50).dump());
  REQUIRE(g.node_count() == 1024U);
  auto const a = sampling::sample_points(g, 100, 1);
  CHECK(a == sampling::sample_points(g, 100, 1));
  CHECK(a != sampling::sample_points(g, 100, 2));
}

TEST_CASE("bind_images") {
  auto const p = sampling::sample_point{"p", kOrigin, std::nullopt};
  auto const near = record("near", geo::offset(kOrigin, 10, 0));
  auto const nearer = record("nearer", geo::offset(kOrigin, 0, 4));
  auto const far = record("far", geo::offset(kOrigin, 80, 0));
  auto const at = record("at", kOrigin);

  CHECK(sampling::bind_images(std::vector{p}, std::vector{at}, 50)[0].image_id_ ==
        "at");
  CHECK_FALSE(
      sampling::bind_images(std::vector{p}, std::vector{far}, 50)[0].image_id_);
  CHECK(sampling::bind_images(std::vector{p}, std::vector{near, nearer, far}, 50)[0]
            .image_id_ == "nearer");
  CHECK(test::kind_thrown([&] {
          sampling::bind_images(std::vector{p}, std::vector{at}, 0);
        }) == error_kind::invalid_argument);
}

}  // TEST_SUITE

TEST_SUITE("indicators") {

TEST_CASE("connectivity on the 4x4 grid") {
  auto doc = test::grid_geojson(kOrigin, 4, 300);
  // signals at two interior nodes (g1_1, g2_2) and at a corner (g0_0)
  for (auto& f : doc["features"]) {
    auto const& id = f["properties"].value("id", "");
    if (id == "g1_1" || id == "g2_2" || id == "g0_0") {
      f["properties"]["signalized"] = true;
    }
  }
  auto const g = ingest::parse_street_graph(doc.dump());
  auto const nodes = geo::spatial_index{locations(g)};
  auto const center = g.nodes_[*g.find_node("g1_1")].location_;
  auto const c = connectivity_counts(center, g, nodes, 5000);
  CHECK(c == connectivity{2, 10, 0});
  CHECK(connectivity_counts(geo::offset(kOrigin, -5000, 0), g, nodes, 500) ==
        connectivity{});
}

TEST_CASE("connectivity: a dead end") {
  auto const g = street({{"highway", "residential"}});
  auto const nodes = geo::spatial_index{locations(g)};
  CHECK(connectivity_counts(kOrigin, g, nodes, 50) == connectivity{0, 0, 1});
}

TEST_CASE("slope on analytic planes") {
  auto dem = ingest::dem_grid{};
  dem.ncols_ = 5;
  dem.nrows_ = 5;
  dem.cell_size_ = 0.001;
  dem.origin_ = {0.0, -0.002};
  dem.values_.assign(25, 7.0);
  CHECK(slope_at({0.002, 0.0}, dem) == 0.0);

  // z = x tan(30 deg) eastwards; the row through the equator has dx = dy.
  auto const dy = geo::to_rad(dem.cell_size_) * geo::kEarthRadius;
  auto const t = std::tan(std::numbers::pi / 6.0);
  for (auto row = 0; row != 5; ++row) {
    for (auto col = 0; col != 5; ++col) {
      dem.values_[row * 5 + col] = col * dy * t;
    }
  }
  auto const s = slope_at({0.002, 0.0}, dem);
  REQUIRE(s.has_value());
  CHECK(std::abs(*s - 30.0) < 1e-9);

  // z = y tan(30 deg) northwards; the top row is north.
  for (auto row = 0; row != 5; ++row) {
    for (auto col = 0; col != 5; ++col) {
      dem.values_[row * 5 + col] = (4 - row) * dy * t;
    }
  }
  CHECK(std::abs(*slope_at({0.002, 0.0}, dem) - 30.0) < 1e-9);

  CHECK_FALSE(slope_at({1.0, 1.0}, dem).has_value());
  CHECK_FALSE(slope_at({0.0, 0.0}, dem).has_value());  // border column
  dem.values_[1 * 5 + 2] = dem.nodata_;
  CHECK_FALSE(slope_at({0.002, 0.0}, dem).has_value());
}

TEST_CASE("poi counts with an inclusive boundary") {
  auto rng = rng_t{3};
  auto pois = std::vector<geo_point>{};
  for (auto i = 0; i != 7; ++i) {
    auto const a = 2.0 * std::numbers::pi * uniform01(rng);
    auto const r = 450.0 * uniform01(rng);
    pois.push_back(geo::offset(kOrigin, r * std::cos(a), r * std::sin(a)));
  }
  for (auto i = 0; i != 3; ++i) {
    pois.push_back(geo::offset(kOrigin, 600.0 + 100.0 * i, 0));
  }
  auto const layer = geo::spatial_index{pois};
  CHECK(count_within(kOrigin, layer, 500) == 7U);
  CHECK(count_within(kOrigin, geo::spatial_index{}, 500) == 0U);

  auto const edge = geo::offset(kOrigin, 0, 500);
  auto const d = geo::haversine_distance(kOrigin, edge);
  CHECK(count_within(kOrigin, geo::spatial_index{std::vector{edge}}, d) == 1U);
}

TEST_CASE("land-use mix") {
  auto const samples = geo::buffer_grid_samples(kOrigin, 500, 25);

  auto single = std::vector<std::pair<geo_point, std::string>>{};
  auto thirds = single;
  auto halves = single;
  auto const n3 = samples.size() / 3 * 3;
  auto const n2 = samples.size() / 2 * 2;
  auto const names = std::array<std::string, 3>{"residential", "commercial",
                                                "industrial"};
  for (auto i = std::size_t{0}; i != samples.size(); ++i) {
    single.emplace_back(samples[i], "residential");
    if (i < n3) {
      thirds.emplace_back(samples[i], names[i % 3]);
    }
    if (i < n2) {
      halves.emplace_back(samples[i], names[i % 2]);
    }
  }
  CHECK(landuse_mix(kOrigin, tiny_squares(single), 500, 25) == 0.0);
  CHECK(std::abs(landuse_mix(kOrigin, tiny_squares(thirds), 500, 25) - 1.0) <
        1e-9);
  CHECK(std::abs(landuse_mix(kOrigin, tiny_squares(halves), 500, 25) -
                 std::log(2.0) / std::log(3.0)) < 1e-6);
  CHECK(std::abs(landuse_mix(kOrigin, tiny_squares(halves), 500, 25) - 0.6309) <
        1e-4);
  CHECK(landuse_mix(kOrigin, ingest::land_use_dataset{}, 500, 25) == 0.0);
}

TEST_CASE("land-use mix: first polygon wins on overlap") {
  auto const big = [](std::string const& cat) {
    return json{{"type", "Feature"},
                {"geometry",
                 {{"type", "Polygon"},
                  {"coordinates",
                   {{{103, 1}, {104, 1}, {104, 2}, {103, 2}, {103, 1}}}}}},
                {"properties", {{"category", cat}}}};
  };
  auto const lu = ingest::parse_land_use(
      test::collection({big("commercial"), big("industrial")}).dump());
  CHECK(landuse_mix(kOrigin, lu, 500, 25) == 0.0);
}

TEST_CASE("air quality by inverse distance weighting") {
  auto const at = [](geo_point p, double v) {
    auto s = ingest::aqi_station{};
    s.location_ = p;
    s.annual_mean_ = v;
    return s;
  };
  auto const o = geo_point{0.0, 0.0};
  auto const two = std::vector{at(geo::offset(o, 1000, 0), 10.0),
                               at(geo::offset(o, 0, 2000), 20.0)};
  CHECK(std::abs(aqi_at(o, two) - 12.0) < 1e-9);

  auto const sym = std::vector{at(geo::offset(o, 700, 0), 10.0),
                               at(geo::offset(o, -700, 0), 20.0)};
  CHECK(std::abs(aqi_at(o, sym) - 15.0) < 1e-9);
  CHECK(aqi_at(sym[1].location_, sym) == 20.0);
  CHECK(aqi_at(geo::offset(sym[0].location_, 0.5, 0), sym) == 10.0);
  CHECK(test::kind_thrown([&] { aqi_at(o, {}); }) ==
        error_kind::configuration_error);
}

TEST_CASE("road type, pavement and width over nearby edges") {
  auto const rule_road = scaling::road_type_rule();
  auto const rule_pave = scaling::pavement_rule();
  {
    auto const g = street({{"highway", "cycleway"}, {"surface", "asphalt"},
                           {"width", 20}});
    auto const nodes = geo::spatial_index{locations(g)};
    CHECK(road_type_score(kOrigin, g, nodes, 100, rule_road) == 1.0);
    CHECK(pavement_score(kOrigin, g, nodes, 100, rule_pave) == 1.0);
    CHECK(road_width_score(kOrigin, g, nodes, 100) == 1.0);
  }
  {
    auto const g = street({{"highway", "residential"}, {"surface", "cobblestone"}});
    auto const nodes = geo::spatial_index{locations(g)};
    CHECK(pavement_score(kOrigin, g, nodes, 100, rule_pave) == 0.2);
    CHECK_FALSE(road_width_score(kOrigin, g, nodes, 100).has_value());
    CHECK_FALSE(
        road_type_score(geo::offset(kOrigin, 0, 5000), g, nodes, 100, rule_road)
            .has_value());
  }
  {
    auto const a = kOrigin;
    auto const b = geo::offset(kOrigin, 300, 0);
    auto const c = geo::offset(kOrigin, 0, 300);
    auto const g = ingest::parse_street_graph(
        test::collection(
            {test::node_feature("a", a), test::node_feature("b", b),
             test::node_feature("c", c),
             test::edge_feature("ab", "a", a, "b", b,
                                {{"highway", "primary"}, {"surface", "sett"},
                                 {"width", 4}}),
             test::edge_feature("ac", "a", a, "c", c,
                                {{"highway", "tertiary"}, {"surface", "asphalt"},
                                 {"width", 6}})})
            .dump());
    auto const nodes = geo::spatial_index{locations(g)};
    CHECK(std::abs(*road_type_score(a, g, nodes, 100, rule_road) - 0.35) < 1e-12);
    CHECK(std::abs(*pavement_score(a, g, nodes, 100, rule_pave) - 0.7) < 1e-12);
    CHECK(road_width_score(a, g, nodes, 100) == 0.5);
    CHECK(edges_near(a, g, nodes, 100) == std::vector<std::size_t>{0, 1});
    CHECK(edges_near(b, g, nodes, 100) == std::vector<std::size_t>{0});
  }
}

TEST_CASE("presence indicators") {
  auto const r = record("i", kOrigin,
                        {{"utility-pole", 0.02}, {"sidewalk", 0.0},
                         {"crosswalk", 0.001}});
  auto const p = svi_presence_indicators(&r);
  REQUIRE(p.has_value());
  CHECK(p->utility_pole_ == 0.0);
  CHECK(p->sidewalk_ == 0.0);
  CHECK(p->crosswalk_ == 1.0);
  CHECK(p->potholes_ == 1.0);
  CHECK_FALSE(svi_presence_indicators(nullptr).has_value());
  CHECK(svi_presence_indicators(&r, 0.01)->crosswalk_ == 0.0);

  auto const s = scenery_fractions(&r);
  CHECK(s->greenery_ == 0.0);
  CHECK_FALSE(scenery_fractions(nullptr).has_value());
}

TEST_CASE("vehicle counts in the buffer") {
  auto const recs = std::vector{
      record("a", geo::offset(kOrigin, 100, 0), json::object(), {{"car", 3}}),
      record("b", geo::offset(kOrigin, 0, 200), json::object(), {{"car", 4}, {"bus", 1}, {"person", 9}}),
      record("c", geo::offset(kOrigin, 900, 0), json::object(), {{"car", 50}})};
  auto locs = std::vector<geo_point>{};
  for (auto const& r : recs) {
    locs.push_back(r.location_);
  }
  auto const index = geo::spatial_index{locs};
  CHECK(vehicle_count_buffer(kOrigin, recs, index, 500) == 8);
  CHECK_FALSE(vehicle_count_buffer(geo::offset(kOrigin, -5000, 0), recs, index, 500)
                  .has_value());
}

TEST_CASE("vehicle-cyclist interaction flags") {
  auto const g = street({{"highway", "residential"}, {"parking", true}}, true);
  auto const nodes = geo::spatial_index{locations(g)};
  auto const light = record("i", kOrigin, {{"traffic-light", 0.01}});
  auto const v = vci_flags(kOrigin, g, nodes, &light, 100);
  CHECK(v.onstreet_parking_ == 0.0);
  CHECK(v.traffic_control_ == 1.0);
  CHECK(v.speed_control_ == 0.0);

  auto const at_b = vci_flags(g.nodes_[1].location_, g, nodes, nullptr, 100);
  CHECK(at_b.speed_control_ == 1.0);
  CHECK_FALSE(at_b.traffic_control_.has_value());

  auto const plain = street({{"highway", "residential"}});
  auto const plain_nodes = geo::spatial_index{locations(plain)};
  CHECK(vci_flags(kOrigin, plain, plain_nodes, nullptr, 100).onstreet_parking_ ==
        1.0);
}

TEST_CASE("extraction: a point without an image misses the 21 imagery entries") {
  auto const g = street({{"highway", "residential"}});
  auto const reg = default_registry();
  auto const table = perception_table{};
  auto const ctx =
      extraction_context{&g, nullptr, nullptr, {}, {}, &table, {}};
  auto const raw =
      ctx.extract_raw({"a", kOrigin, std::nullopt}, reg);
  auto missing_svi = 0;
  for (auto i = std::size_t{0}; i != reg.size(); ++i) {
    if (reg.specs_[i].source_ == source::svi) {
      missing_svi += raw[i].has_value() ? 0 : 1;
    }
  }
  CHECK(missing_svi == 21);
}

TEST_CASE("extraction: all-zero datasets give defined values per rule") {
  auto const g = street({{"highway", "residential"}, {"surface", "dirt"},
                         {"width", 0}});
  auto dem = ingest::dem_grid{};
  dem.ncols_ = dem.nrows_ = 5;
  dem.cell_size_ = 0.001;
  dem.origin_ = {kOrigin.lon_ - 0.002, kOrigin.lat_ - 0.002};
  dem.values_.assign(25, 0.0);
  auto const lu = ingest::parse_land_use(test::collection(json::array()).dump());
  auto st = ingest::aqi_station{};
  st.location_ = geo::offset(kOrigin, 1000, 0);
  auto const stations = std::vector{st};
  auto const recs = std::vector{record("img", kOrigin)};
  auto table = perception_table{};
  table["img"].fill(0.0);

  auto const reg = default_registry();
  auto const ctx = extraction_context{&g, &lu, &dem, stations, recs, &table, {}};
  auto const raw = ctx.extract_raw({"a", kOrigin, "img"}, reg);
  auto rows = std::vector{raw_row{"a", "c", kOrigin, "img", raw}};
  auto const asm_ = assemble_all(reg, rows, scaling::scope::pooled);
  REQUIRE(asm_.vectors_.size() == 1U);
  for (auto i = std::size_t{0}; i != reg.size(); ++i) {
    auto const& v = asm_.vectors_[0].values_[i];
    REQUIRE(v.has_value());
    CHECK((*v == 0.0 || *v == 0.5 || *v == 1.0));
  }
  CHECK(asm_.imputed_ == std::vector<std::size_t>(reg.size(), 0U));
}

TEST_CASE("assembly: drop, scale, impute") {
  auto reg = registry{};
  auto mm = scaling::scaling_rule{};
  auto neg = mm;
  neg.kind_ = scaling::rule_kind::neg_min_max;
  reg.specs_ = {{"a", category::environment, source::non_svi, extraction::poi_count, mm, 500},
                {"b", category::environment, source::non_svi, extraction::slope, neg, 0},
                {"c", category::environment, source::non_svi, extraction::slope, neg, 0}};
  using o = std::optional<double>;
  auto const rows = std::vector<raw_row>{
      {"p1", "x", {}, {}, {o{0.0}, o{1.0}, o{}}},
      {"p2", "x", {}, {}, {o{10.0}, o{}, o{}}},
      {"p3", "y", {}, {}, {o{5.0}, o{3.0}, o{}}},
      {"p4", "y", {}, {}, {o{}, o{}, o{}}}};
  auto w = warnings{};
  auto const out = assemble_all(reg, rows, scaling::scope::pooled, 0.7, &w);
  CHECK(out.dropped_ == std::vector<std::string>{"p4"});
  REQUIRE(out.vectors_.size() == 3U);
  CHECK(out.vectors_[0].values_[0] == 0.0);
  CHECK(out.vectors_[1].values_[0] == 1.0);
  CHECK(out.vectors_[2].values_[0] == 0.5);
  CHECK(out.vectors_[0].values_[1] == 1.0);
  CHECK(out.vectors_[2].values_[1] == 0.0);
  CHECK(out.vectors_[1].values_[1] == 0.5);  // pooled mean of 1 and 0
  CHECK(out.vectors_[1].values_[2] == 0.5);  // missing everywhere
  CHECK(out.imputed_ == std::vector<std::size_t>{0, 1, 3});
  CHECK(w.messages_.size() == 2U);

  auto const per_city = assemble_all(reg, rows, scaling::scope::per_city, 0.7);
  CHECK(per_city.vectors_[1].values_[0] == 1.0);
  CHECK(per_city.vectors_[2].values_[0] == 0.5);  // the only value in city y
}

TEST_CASE("assembly: length mismatch") {
  auto const reg = default_registry();
  auto const rows = std::vector<raw_row>{{"p", "c", {}, {}, {1.0}}};
  CHECK(test::kind_thrown([&] {
          assemble_all(reg, rows, scaling::scope::pooled);
        }) == error_kind::configuration_error);
}

}  // TEST_SUITE
