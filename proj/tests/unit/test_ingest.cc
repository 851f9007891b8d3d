#include "support.h"

#include "bike/ingest/aqi.h"
#include "bike/ingest/csv.h"
#include "bike/ingest/dem.h"
#include "bike/ingest/feature_record.h"
#include "bike/ingest/land_use.h"
#include "bike/ingest/street_graph.h"
#include "bike/ingest/survey.h"
#include "bike/warnings.h"

using namespace bike;
using namespace bike::ingest;
using nlohmann::json;

TEST_SUITE("ingest") {

TEST_CASE("csv reader handles quoting, CRLF and BOM") {
  auto const t = parse_csv("\xEF\xBB\xBF" "a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\n\r\n3,4\n");
  REQUIRE(t.header_ == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows_.size() == 2U);
  CHECK(t.rows_[0].fields_[0] == "x,1");
  CHECK(t.rows_[0].fields_[1] == "say \"hi\"");
  CHECK(t.rows_[1].line_ == 4U);
  CHECK(t.column("b") == 1U);
  CHECK(test::kind_thrown([&] { t.column("c"); }) == error_kind::parse_error);
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("q\"") == "\"q\"\"\"");
  CHECK(parse_double(" 2.5 ") == 2.5);
  CHECK_FALSE(parse_double("2.5x").has_value());
  CHECK_FALSE(parse_int("1.5").has_value());
}

TEST_CASE("street graph: two lines sharing a node") {
  auto const a = geo::geo_point{0, 0};
  auto const b = geo::geo_point{0.001, 0};
  auto const c = geo::geo_point{0.002, 0};
  auto const doc = test::collection(
      {{{"type", "Feature"},
        {"geometry", {{"type", "LineString"}, {"coordinates", {{0, 0}, {0.001, 0}}}}},
        {"properties", {{"highway", "primary"}}}},
       {{"type", "Feature"},
        {"geometry",
         {{"type", "LineString"}, {"coordinates", {{0.001, 0}, {0.002, 0}}}}},
        {"properties", {{"highway", "driveway"}}}}});
  auto const g = parse_street_graph(doc.dump());
  CHECK(g.node_count() == 3U);
  CHECK(g.edge_count() == 2U);
  auto const mid = g.find_node(g.nodes_[g.edges_[0].to_].id_);
  REQUIRE(mid.has_value());
  CHECK(g.nodes_[*mid].location_ == b);
  CHECK(g.degree(*mid) == 2U);
  CHECK(g.edges_[1].highway_ == "driveway");
  (void)a;
  (void)c;
}

TEST_CASE("street graph: 4x4 grid counts and degrees") {
  auto const g = parse_street_graph(test::grid_geojson({103.8, 1.3}, 4, 300).dump());
  CHECK(g.node_count() == 16U);
  CHECK(g.edge_count() == 24U);
  auto hist = std::array<int, 5>{};
  for (auto i = std::size_t{0}; i != g.node_count(); ++i) {
    ++hist.at(g.degree(i));
  }
  CHECK(hist[2] == 4);
  CHECK(hist[3] == 8);
  CHECK(hist[4] == 4);
  // adjacency is consistent with the edge list
  for (auto e = std::size_t{0}; e != g.edge_count(); ++e) {
    for (auto const n : {g.edges_[e].from_, g.edges_[e].to_}) {
      auto const& adj = g.adjacency_[n];
      CHECK(std::find(adj.begin(), adj.end(), e) != adj.end());
    }
  }
}

TEST_CASE("street graph: opposite edges count one neighbour") {
  auto const a = geo::geo_point{0, 0};
  auto const b = geo::geo_point{0.001, 0};
  auto const doc = test::collection({test::node_feature("a", a),
                                     test::node_feature("b", b),
                                     test::edge_feature("ab", "a", a, "b", b),
                                     test::edge_feature("ba", "b", b, "a", a)});
  auto const g = parse_street_graph(doc.dump());
  CHECK(g.degree(*g.find_node("a")) == 1U);
}

TEST_CASE("street graph: tags") {
  auto const a = geo::geo_point{0, 0};
  auto const b = geo::geo_point{0.001, 0};
  auto const doc = test::collection(
      {test::node_feature("a", a, true, false), test::node_feature("b", b, false, true),
       test::edge_feature("ab", "a", a, "b", b,
                          {{"highway", "cycleway"},
                           {"surface", "asphalt"},
                           {"width", "3.5 m"},
                           {"parking:lane:both", "parallel"}}),
       test::point_feature("poi", {0.0005, 0.0005}),
       test::point_feature("transit", {0.0005, -0.0005})});
  auto const g = parse_street_graph(doc.dump());
  auto const& e = g.edges_.at(0);
  CHECK(e.surface_ == "asphalt");
  CHECK(e.width_ == 3.5);
  CHECK(e.onstreet_parking_);
  CHECK(g.nodes_[*g.find_node("a")].signalized_);
  CHECK(g.nodes_[*g.find_node("b")].traffic_calming_);
  CHECK(g.pois_.size() == 1U);
  CHECK(g.transit_stops_.size() == 1U);

  auto const round_trip = parse_street_graph(to_geojson(g).dump());
  CHECK(round_trip.edge_count() == 1U);
  CHECK(round_trip.edges_[0].width_ == 3.5);
  CHECK(round_trip.edges_[0].onstreet_parking_);
}

TEST_CASE("street graph: errors") {
  auto const a = geo::geo_point{0, 0};
  auto const b = geo::geo_point{0.001, 0};
  auto const dangling = test::collection(
      {test::node_feature("a", a), test::edge_feature("ab", "a", a, "zz", b)});
  try {
    parse_street_graph(dangling.dump());
    FAIL("expected an integrity error");
  } catch (error const& e) {
    CHECK(e.kind() == error_kind::integrity_error);
    CHECK(std::string{e.what()}.find("zz") != std::string::npos);
  }
  try {
    parse_street_graph("{\n  \"type\": \"FeatureCollection\",\n  \"features\": [\n  oops\n]}");
    FAIL("expected a parse error");
  } catch (error const& e) {
    CHECK(e.kind() == error_kind::parse_error);
    CHECK(std::string{e.what()}.find("line 4") != std::string::npos);
  }
  auto const bad_width = test::collection(
      {test::node_feature("a", a), test::node_feature("b", b),
       test::edge_feature("ab", "a", a, "b", b, {{"width", "wide"}})});
  CHECK(test::kind_thrown([&] { parse_street_graph(bad_width.dump()); }) ==
        error_kind::validation_error);
}

TEST_CASE("dem ascii grid") {
  auto const g = parse_dem_ascii_grid(
      "ncols 2\nnrows 2\nxllcorner 10\nyllcorner 20\ncellsize 0.5\n"
      "NODATA_value -1\n0 0\n0 -1\n");
  CHECK(g.values_.size() == 4U);
  CHECK(g.origin_ == geo::geo_point{10.25, 20.25});
  CHECK(g.is_nodata(g.value(1, 1)));
  CHECK(g.value(0, 0) == 0.0);
  // row 0 is the northern row
  CHECK(g.cell_center(0, 0) == geo::geo_point{10.25, 20.75});

  CHECK(test::kind_thrown([] {
          parse_dem_ascii_grid("ncols 2\nnrows 2\ncellsize 1\n0 0 0 0\n");
        }) == error_kind::parse_error);
  CHECK(test::kind_thrown([] {
          parse_dem_ascii_grid(
              "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n0 0 0\n");
        }) == error_kind::parse_error);
}

TEST_CASE("aqi stations: daily maxima then annual mean") {
  auto const s = parse_aqi_stations(
      "station_id,lon,lat,date,value\n"
      "a,1,2,d1,10\na,1,2,d2,20\na,1,2,d3,30\n"
      "b,3,4,d1,5\nb,3,4,d1,9\nb,3,4,d2,7\n");
  REQUIRE(s.size() == 2U);
  CHECK(s[0].annual_mean_ == 20.0);
  CHECK(s[1].daily_maxima_.size() == 2U);
  CHECK(s[1].annual_mean_ == 8.0);
  CHECK(test::kind_thrown([] {
          parse_aqi_stations("station_id,lon,lat,date,value\na,1,2,d1,high\n");
        }) == error_kind::validation_error);
}

TEST_CASE("feature records") {
  auto const rec = json{{"image_id", "i1"},
                        {"location", {{"lon", 1.0}, {"lat", 2.0}}},
                        {"seg_fraction", {{"greenery", 0.3}, {"sky", 0.5}}},
                        {"object_count", {{"car", 3}}},
                        {"scene_prob", {{"plaza", 0.2}}},
                        {"canny_edge_llf", 0.1}};
  auto const r = parse_feature_record(rec);
  CHECK(r.seg("greenery") == 0.3);
  CHECK(r.seg("water") == 0.0);
  CHECK(r.count("car") == 3);
  CHECK(parse_feature_record(to_json(r)).seg("greenery") == 0.3);
  CHECK(parse_feature_records("").empty());
  CHECK(parse_feature_records("\n\n").empty());

  auto bad = rec;
  bad["seg_fraction"]["greenery"] = 1.2;
  CHECK(test::kind_thrown([&] { parse_feature_record(bad); }) ==
        error_kind::validation_error);
  bad = rec;
  bad["seg_fraction"]["water"] = 0.3;
  CHECK(test::kind_thrown([&] { parse_feature_record(bad); }) ==
        error_kind::validation_error);
  bad = rec;
  bad["object_count"]["car"] = 1.5;
  CHECK(test::kind_thrown([&] { parse_feature_record(bad); }) ==
        error_kind::validation_error);

  auto const line = rec.dump() + "\n";
  CHECK(test::kind_thrown([&] { parse_feature_records(line + line); }) ==
        error_kind::validation_error);
}

TEST_CASE("feature records file round trip") {
  auto const dir = test::temp_dir{};
  auto const r = parse_feature_record(
      {{"image_id", "x"},
       {"location", {{"lon", 103.81}, {"lat", 1.31}}},
       {"seg_fraction", {{"greenery", 0.3}}},
       {"hue_mean_llf", 12.5}});
  write_feature_records({r}, dir / "f.jsonl");
  auto const back = load_feature_records(dir / "f.jsonl");
  REQUIRE(back.size() == 1U);
  CHECK(back[0].seg("greenery") == 0.3);
  CHECK(back[0].lowlevel_.at("hue_mean_llf") == 12.5);
  CHECK(back[0].location_ == r.location_);
}

TEST_CASE("survey responses") {
  auto w = warnings{};
  auto const rows = parse_survey_responses(
      "image_id,rater_id,dimension,rating\n"
      "i1,r1,safety,4\ni1,r2,safety,6\ni1,r1,safety,9\n",
      &w);
  REQUIRE(rows.size() == 2U);
  CHECK(rows[0].rating_ == 9);
  CHECK(w.messages_.size() == 1U);
  CHECK(test::kind_thrown([] {
          parse_survey_responses("image_id,rater_id,dimension,rating\ni,r,safety,11\n");
        }) == error_kind::validation_error);
  CHECK(test::kind_thrown([] {
          parse_survey_responses("image_id,rater_id,dimension,rating\ni,r,joy,1\n");
        }) == error_kind::validation_error);
}

TEST_CASE("land use") {
  auto const doc = json{
      {"type", "FeatureCollection"},
      {"features",
       {{{"type", "Feature"},
         {"geometry",
          {{"type", "MultiPolygon"},
           {"coordinates",
            {{{{0, 0}, {1, 0}, {1, 1}, {0, 0}}}, {{{2, 2}, {3, 2}, {3, 3}, {2, 2}}}}}}},
         {"properties", {{"category", "commercial"}}}}}}};
  auto const ds = parse_land_use(doc.dump());
  REQUIRE(ds.polygons_.size() == 2U);
  CHECK(ds.polygons_[1].category_ == land_use::commercial);

  auto bad = doc;
  bad["features"][0]["properties"]["category"] = "farmland";
  CHECK(test::kind_thrown([&] { parse_land_use(bad.dump()); }) ==
        error_kind::validation_error);
}

}  // TEST_SUITE
