#include "bike/pipeline/config.h"

#include <set>

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/ingest/csv.h"
#include "bike/ingest/street_graph.h"

namespace bike::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_keys(json const& j, std::set<std::string> const& allowed,
                std::string_view const where) {
  if (!j.is_object()) {
    fail(error_kind::configuration_error,
         fmt::format("{} must be a JSON object", where));
  }
  for (auto const& [k, v] : j.items()) {
    if (!allowed.contains(k)) {
      fail(error_kind::configuration_error,
           fmt::format("unknown key '{}' in {}", k, where));
    }
  }
}

fs::path resolve(json const& v, fs::path const& base) {
  auto p = fs::path{v.get<std::string>()};
  return p.is_relative() && !base.empty() ? base / p : p;
}

std::optional<fs::path> optional_path(json const& j, char const* key,
                                      fs::path const& base) {
  if (!j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return resolve(j.at(key), base);
}

}  // namespace

run_config config_from_json(json const& j, fs::path const& base) {
  auto c = run_config{};
  try {
    check_keys(j,
               {"cities", "survey", "registry", "seed", "radii",
                "bind_distance", "idw", "mad_threshold", "landuse_cell",
                "presence_threshold", "max_missing", "alpha", "scaling_scope",
                "variants", "regressor", "threads", "output_dir"},
               "run config");
    for (auto const& city : j.at("cities")) {
      check_keys(city,
                 {"name", "street_graph", "land_use", "dem", "aqi", "features",
                  "n"},
                 "city entry");
      auto cc = city_config{};
      cc.name_ = city.at("name").get<std::string>();
      cc.street_graph_ = resolve(city.at("street_graph"), base);
      cc.land_use_ = optional_path(city, "land_use", base);
      cc.dem_ = optional_path(city, "dem", base);
      cc.aqi_ = optional_path(city, "aqi", base);
      cc.features_ = optional_path(city, "features", base);
      auto const n = city.at("n").get<long long>();
      if (n <= 0) {
        fail(error_kind::configuration_error,
             fmt::format("city '{}': n must be positive", cc.name_));
      }
      cc.n_ = static_cast<std::size_t>(n);
      c.cities_.push_back(std::move(cc));
    }
    c.survey_ = optional_path(j, "survey", base);
    c.registry_ = optional_path(j, "registry", base);
    c.seed_ = j.value("seed", c.seed_);
    if (j.contains("radii")) {
      auto const& r = j.at("radii");
      check_keys(r, {"buffer", "edge"}, "radii");
      c.buffer_radius_ = r.value("buffer", c.buffer_radius_);
      c.edge_radius_ = r.value("edge", c.edge_radius_);
    }
    c.bind_distance_ = j.value("bind_distance", c.bind_distance_);
    if (j.contains("idw")) {
      auto const& r = j.at("idw");
      check_keys(r, {"power", "epsilon"}, "idw");
      c.idw_power_ = r.value("power", c.idw_power_);
      c.idw_epsilon_ = r.value("epsilon", c.idw_epsilon_);
    }
    c.mad_threshold_ = j.value("mad_threshold", c.mad_threshold_);
    c.landuse_cell_ = j.value("landuse_cell", c.landuse_cell_);
    c.presence_threshold_ = j.value("presence_threshold", c.presence_threshold_);
    c.max_missing_ = j.value("max_missing", c.max_missing_);
    c.alpha_ = j.value("alpha", c.alpha_);
    if (j.contains("scaling_scope")) {
      c.scope_ = scaling::parse_scope(j.at("scaling_scope").get<std::string>());
    }
    if (j.contains("variants")) {
      c.variants_.clear();
      for (auto const& v : j.at("variants")) {
        c.variants_.push_back(index::parse_variant(v.get<std::string>()));
      }
    }
    if (j.contains("regressor")) {
      auto const& r = j.at("regressor");
      check_keys(r, {"kind", "lambda", "split", "seed", "gbt", "grid", "folds"},
                 "regressor");
      auto& o = c.regressor_;
      if (r.contains("kind")) {
        o.kind_ = perception::parse_model_kind(r.at("kind").get<std::string>());
      }
      o.lambda_ = r.value("lambda", o.lambda_);
      o.split_ = r.value("split", o.split_);
      o.seed_ = r.value("seed", o.seed_);
      if (r.contains("gbt")) {
        o.gbt_ = perception::gbt_params_from_json(r.at("gbt"));
      }
      if (r.contains("grid")) {
        for (auto const& g : r.at("grid")) {
          o.grid_.push_back(perception::gbt_params_from_json(g));
        }
      }
      o.folds_ = r.value("folds", o.folds_);
    }
    c.threads_ = j.value("threads", c.threads_);
    if (j.contains("output_dir")) {
      c.output_dir_ = resolve(j.at("output_dir"), base);
    }
  } catch (json::exception const& e) {
    fail(error_kind::configuration_error,
         fmt::format("malformed run config: {}", e.what()));
  }
  return c;
}

json to_json(run_config const& c) {
  auto cities = json::array();
  for (auto const& city : c.cities_) {
    auto cj = json{{"name", city.name_},
                   {"street_graph", city.street_graph_.string()},
                   {"n", city.n_}};
    auto const put = [&](char const* key, std::optional<fs::path> const& p) {
      if (p.has_value()) {
        cj[key] = p->string();
      }
    };
    put("land_use", city.land_use_);
    put("dem", city.dem_);
    put("aqi", city.aqi_);
    put("features", city.features_);
    cities.push_back(std::move(cj));
  }
  auto variants = json::array();
  for (auto const v : c.variants_) {
    variants.push_back(index::to_string(v));
  }
  auto grid = json::array();
  for (auto const& g : c.regressor_.grid_) {
    grid.push_back(perception::to_json(g));
  }
  auto j = json{
      {"cities", cities},
      {"seed", c.seed_},
      {"radii", {{"buffer", c.buffer_radius_}, {"edge", c.edge_radius_}}},
      {"bind_distance", c.bind_distance_},
      {"idw", {{"power", c.idw_power_}, {"epsilon", c.idw_epsilon_}}},
      {"mad_threshold", c.mad_threshold_},
      {"landuse_cell", c.landuse_cell_},
      {"presence_threshold", c.presence_threshold_},
      {"max_missing", c.max_missing_},
      {"alpha", c.alpha_},
      {"scaling_scope", scaling::to_string(c.scope_)},
      {"variants", variants},
      {"regressor",
       {{"kind", perception::to_string(c.regressor_.kind_)},
        {"lambda", c.regressor_.lambda_},
        {"split", c.regressor_.split_},
        {"seed", c.regressor_.seed_},
        {"gbt", perception::to_json(c.regressor_.gbt_)},
        {"grid", grid},
        {"folds", c.regressor_.folds_}}},
      {"threads", c.threads_},
      {"output_dir", c.output_dir_.string()}};
  if (c.survey_.has_value()) {
    j["survey"] = c.survey_->string();
  }
  if (c.registry_.has_value()) {
    j["registry"] = c.registry_->string();
  }
  return j;
}

run_config load_config(
    fs::path const& path,
    std::vector<std::pair<std::string, json>> const& overrides) {
  if (!fs::exists(path)) {
    fail(error_kind::configuration_error,
         fmt::format("config file '{}' does not exist", path.string()));
  }
  auto j = json{};
  try {
    j = ingest::parse_json_with_context(ingest::read_file(path),
                                        path.string());
  } catch (error const& e) {
    fail(error_kind::configuration_error, e.what());
  }
  for (auto const& [pointer, value] : overrides) {
    try {
      j[json::json_pointer{pointer}] = value;
    } catch (json::exception const& e) {
      fail(error_kind::configuration_error,
           fmt::format("cannot override '{}': {}", pointer, e.what()));
    }
  }
  return config_from_json(j, path.parent_path());
}

void validate(run_config const& c) {
  auto const bad = [](std::string const& msg) {
    fail(error_kind::configuration_error, msg);
  };
  if (c.cities_.empty()) {
    bad("run config lists no city");
  }
  auto names = std::set<std::string>{};
  auto const must_exist = [&](fs::path const& p, std::string_view what) {
    if (!fs::is_regular_file(p)) {
      bad(fmt::format("{} '{}' does not exist", what, p.string()));
    }
  };
  for (auto const& city : c.cities_) {
    if (city.name_.empty() || city.name_.find('/') != std::string::npos ||
        !names.insert(city.name_).second) {
      bad(fmt::format("city name '{}' is empty, contains '/', or repeats",
                      city.name_));
    }
    if (city.n_ == 0) {
      bad(fmt::format("city '{}': n must be positive", city.name_));
    }
    must_exist(city.street_graph_, "street graph");
    for (auto const* p : {&city.land_use_, &city.dem_, &city.aqi_,
                          &city.features_}) {
      if (p->has_value()) {
        must_exist(**p, "dataset");
      }
    }
  }
  if (c.survey_.has_value()) {
    must_exist(*c.survey_, "survey file");
  }
  if (c.registry_.has_value()) {
    must_exist(*c.registry_, "indicator registry");
  }
  if (!(c.buffer_radius_ > 0.0) || !(c.edge_radius_ > 0.0)) {
    bad("buffer radii must be positive");
  }
  if (!(c.bind_distance_ > 0.0)) {
    bad("bind_distance must be positive");
  }
  if (!(c.idw_power_ > 0.0) || !(c.idw_epsilon_ >= 0.0)) {
    bad("idw power must be positive and epsilon non-negative");
  }
  if (!(c.mad_threshold_ > 0.0)) {
    bad("mad_threshold must be positive");
  }
  if (!(c.landuse_cell_ > 0.0) || c.landuse_cell_ > c.buffer_radius_) {
    bad("landuse_cell must be positive and not exceed the buffer radius");
  }
  if (!(c.presence_threshold_ >= 0.0 && c.presence_threshold_ < 1.0)) {
    bad("presence_threshold must lie in [0,1)");
  }
  if (!(c.max_missing_ >= 0.0 && c.max_missing_ <= 1.0)) {
    bad("max_missing must lie in [0,1]");
  }
  if (!(c.alpha_ > 0.0 && c.alpha_ < 1.0)) {
    bad("alpha must lie in (0,1)");
  }
  if (c.variants_.empty()) {
    bad("at least one index variant is required");
  }
  auto const& r = c.regressor_;
  if (!(r.lambda_ >= 0.0)) {
    bad("regressor lambda must be >= 0");
  }
  if (!(r.split_ > 0.0 && r.split_ < 1.0)) {
    bad("regressor split must lie in (0,1)");
  }
  if (r.folds_ < 2) {
    bad("regressor folds must be at least 2");
  }
}

}  // namespace bike::pipeline
