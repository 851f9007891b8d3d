#include "bike/pipeline/pipeline.h"

#include <fstream>
#include <map>

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/index/compare.h"
#include "bike/index/composite.h"
#include "bike/ingest/csv.h"
#include "bike/ingest/survey.h"
#include "bike/parallel.h"
#include "bike/perception/features.h"
#include "bike/perception/regression.h"
#include "bike/perception/survey_stats.h"
#include "bike/perception/ttest.h"
#include "bike/pipeline/digest.h"
#include "bike/pipeline/export.h"

namespace bike::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;
using indicators::indicator_vector;
using indicators::raw_row;
using sampling::sample_point;

std::string_view to_string(stage const s) {
  switch (s) {
    case stage::ingest: return "ingest";
    case stage::sample: return "sample";
    case stage::extract: return "extract";
    case stage::perception: return "perception";
    case stage::scale: return "scale";
    case stage::compose: return "compose";
    case stage::compare: return "compare";
    case stage::export_results: return "export";
  }
  return "?";
}

std::optional<stage> parse_stage(std::string_view const s) {
  for (auto const st : kStages) {
    if (to_string(st) == s) {
      return st;
    }
  }
  return std::nullopt;
}

// ---- building blocks -------------------------------------------------------

city_data load_city(city_config const& c, warnings* w) {
  auto d = city_data{};
  d.name_ = c.name_;
  d.graph_ = ingest::load_street_graph(c.street_graph_);
  if (c.land_use_.has_value()) {
    d.land_use_ = ingest::load_land_use(*c.land_use_);
  }
  if (c.dem_.has_value()) {
    d.dem_ = ingest::load_dem_ascii_grid(*c.dem_);
  }
  if (c.aqi_.has_value()) {
    d.stations_ = ingest::load_aqi_stations(*c.aqi_, w);
  }
  if (c.features_.has_value()) {
    d.records_ = ingest::load_feature_records(*c.features_);
  }
  return d;
}

indicators::registry load_registry(run_config const& cfg) {
  if (cfg.registry_.has_value()) {
    return indicators::registry_from_json(ingest::parse_json_with_context(
        ingest::read_file(*cfg.registry_), cfg.registry_->string()));
  }
  return indicators::default_registry(cfg.buffer_radius_, cfg.edge_radius_);
}

indicators::extraction_params extraction_params_of(run_config const& cfg) {
  auto p = indicators::extraction_params{};
  p.idw_power_ = cfg.idw_power_;
  p.idw_epsilon_ = cfg.idw_epsilon_;
  p.landuse_cell_ = cfg.landuse_cell_;
  p.presence_threshold_ = cfg.presence_threshold_;
  return p;
}

std::vector<sample_point> sample_city(city_data const& city, std::size_t const n,
                                      std::uint64_t const seed,
                                      double const bind_distance) {
  auto points = sampling::sample_points(city.graph_, n, seed);
  if (!city.records_.empty()) {
    points = sampling::bind_images(points, city.records_, bind_distance);
  }
  for (auto& p : points) {
    p.id_ = fmt::format("{}/{}", city.name_, p.id_);
  }
  return points;
}

std::vector<raw_row> extract_city(city_data const& city,
                                  std::span<sample_point const> points,
                                  indicators::registry const& reg,
                                  indicators::extraction_params const& p,
                                  indicators::perception_table const* perception,
                                  std::size_t const threads) {
  auto const ctx = indicators::extraction_context{
      &city.graph_,
      city.land_use_.has_value() ? &*city.land_use_ : nullptr,
      city.dem_.has_value() ? &*city.dem_ : nullptr,
      city.stations_,
      city.records_,
      perception,
      p};
  auto rows = std::vector<raw_row>(points.size());
  parallel_for(points.size(), threads, [&](std::size_t const i) {
    auto const& pt = points[i];
    rows[i] = raw_row{pt.id_, city.name_, pt.location_, pt.image_id_,
                      ctx.extract_raw(pt, reg)};
  });
  return rows;
}

// ---- serialization of stage products ---------------------------------------

namespace {

json opt(std::optional<double> const& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

std::optional<double> opt_double(json const& j) {
  return j.is_null() ? std::nullopt : std::optional{j.get<double>()};
}

json to_json(std::vector<std::optional<double>> const& v) {
  auto a = json::array();
  for (auto const& x : v) {
    a.push_back(opt(x));
  }
  return a;
}

std::vector<std::optional<double>> optionals(json const& j) {
  auto out = std::vector<std::optional<double>>{};
  for (auto const& x : j) {
    out.push_back(opt_double(x));
  }
  return out;
}

json samples_to_json(std::vector<std::vector<sample_point>> const& s) {
  auto a = json::array();
  for (auto const& city : s) {
    auto c = json::array();
    for (auto const& p : city) {
      c.push_back({{"id", p.id_},
                   {"lon", p.location_.lon_},
                   {"lat", p.location_.lat_},
                   {"image_id", p.image_id_.has_value() ? json(*p.image_id_)
                                                        : json(nullptr)}});
    }
    a.push_back(std::move(c));
  }
  return a;
}

std::vector<std::vector<sample_point>> samples_from_json(json const& j) {
  auto out = std::vector<std::vector<sample_point>>{};
  for (auto const& city : j) {
    auto& c = out.emplace_back();
    for (auto const& p : city) {
      auto sp = sample_point{p.at("id").get<std::string>(),
                             {p.at("lon").get<double>(), p.at("lat").get<double>()},
                             std::nullopt};
      if (!p.at("image_id").is_null()) {
        sp.image_id_ = p.at("image_id").get<std::string>();
      }
      c.push_back(std::move(sp));
    }
  }
  return out;
}

json rows_to_json(std::vector<raw_row> const& rows) {
  auto a = json::array();
  for (auto const& r : rows) {
    a.push_back({{"point_id", r.point_id_},
                 {"city", r.city_},
                 {"lon", r.location_.lon_},
                 {"lat", r.location_.lat_},
                 {"image_id", r.image_id_.has_value() ? json(*r.image_id_)
                                                      : json(nullptr)},
                 {"values", to_json(r.values_)}});
  }
  return a;
}

std::vector<raw_row> rows_from_json(json const& j) {
  auto out = std::vector<raw_row>{};
  for (auto const& r : j) {
    auto row = raw_row{r.at("point_id").get<std::string>(),
                       r.at("city").get<std::string>(),
                       {r.at("lon").get<double>(), r.at("lat").get<double>()},
                       std::nullopt,
                       optionals(r.at("values"))};
    if (!r.at("image_id").is_null()) {
      row.image_id_ = r.at("image_id").get<std::string>();
    }
    out.push_back(std::move(row));
  }
  return out;
}

struct perception_product {
  indicators::perception_table table_;
  std::vector<dimension_metrics> metrics_;
  std::vector<perception::ttest_result> ttests_;
  std::map<std::string, json> models_;
};

json to_json(perception_product const& p) {
  auto table = json::object();
  for (auto const& [id, scores] : p.table_) {
    auto a = json::array();
    for (auto const& s : scores) {
      a.push_back(opt(s));
    }
    table[id] = std::move(a);
  }
  auto metrics = json::array();
  for (auto const& m : p.metrics_) {
    metrics.push_back({{"dimension", m.dimension_},
                       {"mae", m.metrics_.mae_},
                       {"mape", opt(m.metrics_.mape_)},
                       {"rmse", m.metrics_.rmse_},
                       {"r2", m.metrics_.r2_}});
  }
  auto ttests = json::array();
  for (auto const& t : p.ttests_) {
    ttests.push_back({{"feature", t.feature_},
                      {"dimension", t.dimension_},
                      {"computable", t.computable_},
                      {"t", t.t_},
                      {"df", t.df_},
                      {"p", t.p_},
                      {"mean_a", t.mean_a_},
                      {"mean_b", t.mean_b_},
                      {"n_a", t.n_a_},
                      {"n_b", t.n_b_},
                      {"significant", t.significant_}});
  }
  return {{"table", table},
          {"metrics", metrics},
          {"ttests", ttests},
          {"models", p.models_}};
}

perception_product perception_from_json(json const& j) {
  auto p = perception_product{};
  for (auto const& [id, a] : j.at("table").items()) {
    auto& row = p.table_[id];
    for (auto i = std::size_t{0}; i != row.size(); ++i) {
      row[i] = opt_double(a.at(i));
    }
  }
  for (auto const& m : j.at("metrics")) {
    auto d = dimension_metrics{m.at("dimension").get<std::string>(), {}};
    d.metrics_.mae_ = m.at("mae").get<double>();
    d.metrics_.mape_ = opt_double(m.at("mape"));
    d.metrics_.rmse_ = m.at("rmse").get<double>();
    d.metrics_.r2_ = m.at("r2").get<double>();
    p.metrics_.push_back(std::move(d));
  }
  for (auto const& t : j.at("ttests")) {
    auto r = perception::ttest_result{};
    r.feature_ = t.at("feature").get<std::string>();
    r.dimension_ = t.at("dimension").get<std::string>();
    r.computable_ = t.at("computable").get<bool>();
    r.t_ = t.at("t").get<double>();
    r.df_ = t.at("df").get<double>();
    r.p_ = t.at("p").get<double>();
    r.mean_a_ = t.at("mean_a").get<double>();
    r.mean_b_ = t.at("mean_b").get<double>();
    r.n_a_ = t.at("n_a").get<std::size_t>();
    r.n_b_ = t.at("n_b").get<std::size_t>();
    r.significant_ = t.at("significant").get<bool>();
    p.ttests_.push_back(std::move(r));
  }
  for (auto const& [dim, m] : j.at("models").items()) {
    p.models_.emplace(dim, m);
  }
  return p;
}

struct scale_product {
  std::vector<indicator_vector> vectors_;
  std::vector<std::string> dropped_;
};

json to_json(scale_product const& s) {
  auto a = json::array();
  for (auto const& v : s.vectors_) {
    a.push_back({{"point_id", v.point_id_},
                 {"city", v.city_},
                 {"lon", v.location_.lon_},
                 {"lat", v.location_.lat_},
                 {"values", to_json(v.values_)}});
  }
  return {{"vectors", a}, {"dropped", s.dropped_}};
}

scale_product scale_from_json(json const& j) {
  auto s = scale_product{};
  for (auto const& v : j.at("vectors")) {
    s.vectors_.push_back(
        {v.at("point_id").get<std::string>(), v.at("city").get<std::string>(),
         {v.at("lon").get<double>(), v.at("lat").get<double>()},
         optionals(v.at("values"))});
  }
  s.dropped_ = j.at("dropped").get<std::vector<std::string>>();
  return s;
}

json to_json(variant_scores const& scores) {
  auto j = json::object();
  for (auto const& [var, list] : scores) {
    auto a = json::array();
    for (auto const& s : list) {
      auto cats = json::array();
      for (auto const& c : s.category_) {
        cats.push_back(opt(c));
      }
      a.push_back({{"point_id", s.point_id_},
                   {"city", s.city_},
                   {"categories", cats},
                   {"total", s.total_}});
    }
    j[std::string{index::to_string(var)}] = std::move(a);
  }
  return j;
}

variant_scores scores_from_json(json const& j) {
  auto out = variant_scores{};
  for (auto const& [name, a] : j.items()) {
    auto const var = index::parse_variant(name);
    auto& list = out[var];
    for (auto const& s : a) {
      auto cs = index::composite_score{};
      cs.point_id_ = s.at("point_id").get<std::string>();
      cs.city_ = s.at("city").get<std::string>();
      cs.variant_ = var;
      auto const& cats = s.at("categories");
      for (auto c = std::size_t{0}; c != cs.category_.size(); ++c) {
        cs.category_[c] = opt_double(cats.at(c));
      }
      cs.total_ = s.at("total").get<double>();
      list.push_back(std::move(cs));
    }
  }
  return out;
}

json to_json(index::comparison_report const& r) {
  auto pairs = json::array();
  for (auto const& p : r.pairs_) {
    pairs.push_back({{"a", index::to_string(p.a_)},
                     {"b", index::to_string(p.b_)},
                     {"r", opt(p.r_)},
                     {"r2", opt(p.r2_)}});
  }
  auto sums = json::array();
  for (auto const& s : r.summaries_) {
    sums.push_back({{"variant", index::to_string(s.variant_)},
                    {"n", s.n_},
                    {"mean", s.mean_},
                    {"sd", s.sd_},
                    {"excess_kurtosis", opt(s.excess_kurtosis_)}});
  }
  return {{"pairs", pairs}, {"summaries", sums}};
}

index::comparison_report comparison_from_json(json const& j) {
  auto r = index::comparison_report{};
  for (auto const& p : j.at("pairs")) {
    r.pairs_.push_back({index::parse_variant(p.at("a").get<std::string>()),
                        index::parse_variant(p.at("b").get<std::string>()),
                        opt_double(p.at("r")), opt_double(p.at("r2"))});
  }
  for (auto const& s : j.at("summaries")) {
    r.summaries_.push_back(
        {index::parse_variant(s.at("variant").get<std::string>()),
         s.at("n").get<std::size_t>(), s.at("mean").get<double>(),
         s.at("sd").get<double>(), opt_double(s.at("excess_kurtosis"))});
  }
  return r;
}

// ---- runner ----------------------------------------------------------------

class runner {
public:
  runner(run_config const& cfg, warnings* w)
      : cfg_{cfg},
        w_{w},
        reg_{load_registry(cfg)},
        cache_dir_{cfg.output_dir_ / "cache"} {
    compute_digests();
  }

  run_report run(stage const last) {
    auto report = run_report{};
    for (auto const s : kStages) {
      auto const cached = cache_valid(s);
      if (!cached) {
        try {
          compute(s);
        } catch (error const& e) {
          fail(e.kind(), fmt::format("stage '{}': {}", to_string(s), e.what()));
        } catch (json::exception const& e) {
          fail(error_kind::parse_error,
               fmt::format("stage '{}': {}", to_string(s), e.what()));
        }
      }
      report.stages_.push_back(
          {s, cached ? stage_status::cached : stage_status::computed,
           digest_.at(s)});
      if (s == last) {
        break;
      }
    }
    return report;
  }

private:
  void compute_digests() {
    auto in = digest_builder{};
    for (auto const& c : cfg_.cities_) {
      in.add(c.name_).add(file_digest(c.street_graph_));
      for (auto const* p : {&c.land_use_, &c.dem_, &c.aqi_, &c.features_}) {
        in.add(p->has_value() ? file_digest(**p) : "none");
      }
    }
    in.add(cfg_.survey_.has_value() ? file_digest(*cfg_.survey_) : "none");
    digest_[stage::ingest] = in.finish();

    auto const& cfg = cfg_;
    auto const chain = [&](stage const s, std::initializer_list<stage> deps,
                           json const& params) {
      auto b = digest_builder{};
      b.add(to_string(s));
      for (auto const d : deps) {
        b.add(digest_.at(d));
      }
      b.add(params.dump());
      digest_[s] = b.finish();
    };
    auto ns = json::array();
    for (auto const& c : cfg.cities_) {
      ns.push_back(c.n_);
    }
    chain(stage::sample, {stage::ingest},
          {{"n", ns}, {"seed", cfg.seed_}, {"bind", cfg.bind_distance_}});
    auto const p = extraction_params_of(cfg);
    chain(stage::extract, {stage::sample},
          {{"registry", indicators::to_json(reg_)},
           {"idw", {p.idw_power_, p.idw_epsilon_}},
           {"cell", p.landuse_cell_},
           {"presence", p.presence_threshold_}});
    auto const full = to_json(cfg);
    chain(stage::perception, {stage::ingest},
          {{"mad", cfg.mad_threshold_},
           {"regressor", full.at("regressor")},
           {"alpha", cfg.alpha_}});
    chain(stage::scale, {stage::extract, stage::perception},
          {{"scope", scaling::to_string(cfg.scope_)},
           {"max_missing", cfg.max_missing_}});
    chain(stage::compose, {stage::scale},
          {{"registry", indicators::to_json(reg_)}});
    chain(stage::compare, {stage::compose}, {{"variants", full.at("variants")}});
    chain(stage::export_results,
          {stage::perception, stage::scale, stage::compose, stage::compare},
          json::object());
  }

  fs::path cache_path(stage const s) const {
    return cache_dir_ / fmt::format("{}.json", to_string(s));
  }

  std::optional<json> read_cache(stage const s) const {
    auto const path = cache_path(s);
    if (!fs::is_regular_file(path)) {
      return std::nullopt;
    }
    auto j = json::parse(ingest::read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("digest") ||
        j.at("digest") != digest_.at(s)) {
      return std::nullopt;
    }
    return j;
  }

  void write_cache(stage const s, json data) const {
    auto const j = json{{"stage", to_string(s)},
                        {"digest", digest_.at(s)},
                        {"data", std::move(data)}};
    write_text(cache_path(s), j.dump());
  }

  bool cache_valid(stage const s) const {
    auto const j = read_cache(s);
    if (!j.has_value()) {
      return false;
    }
    if (s != stage::export_results) {
      return true;
    }
    for (auto const& [rel, sha] : j->at("data").at("files").items()) {
      auto const path = cfg_.output_dir_ / rel;
      if (!fs::is_regular_file(path) || file_digest(path) != sha) {
        return false;
      }
    }
    return true;
  }

  json cached_data(stage const s) const {
    auto j = read_cache(s);
    if (!j.has_value()) {
      fail(error_kind::io_error,
           fmt::format("cache for stage '{}' vanished", to_string(s)));
    }
    return std::move(j->at("data"));
  }

  void compute(stage const s) {
    switch (s) {
      case stage::ingest:
        cities();
        write_cache(s, {{"cities", cities_->size()}});
        break;
      case stage::sample:
        samples_ = compute_samples();
        write_cache(s, samples_to_json(*samples_));
        break;
      case stage::extract:
        raw_ = compute_raw();
        write_cache(s, rows_to_json(*raw_));
        break;
      case stage::perception:
        perception_ = compute_perception();
        write_cache(s, to_json(*perception_));
        break;
      case stage::scale:
        scaled_ = compute_scaled();
        write_cache(s, to_json(*scaled_));
        break;
      case stage::compose:
        composed_ = compute_composed();
        write_cache(s, to_json(*composed_));
        break;
      case stage::compare:
        compared_ = index::compare_variants(compare_input(), w_);
        write_cache(s, to_json(*compared_));
        break;
      case stage::export_results: write_cache(s, export_all()); break;
    }
  }

  // ---- lazily available products -------------------------------------------

  std::vector<city_data>& cities() {
    if (!cities_.has_value()) {
      cities_.emplace();
      for (auto const& c : cfg_.cities_) {
        cities_->push_back(load_city(c, w_));
      }
    }
    return *cities_;
  }

  std::vector<std::vector<sample_point>>& samples() {
    if (!samples_.has_value()) {
      samples_ = samples_from_json(cached_data(stage::sample));
    }
    return *samples_;
  }

  std::vector<raw_row>& raw() {
    if (!raw_.has_value()) {
      raw_ = rows_from_json(cached_data(stage::extract));
    }
    return *raw_;
  }

  perception_product& perception() {
    if (!perception_.has_value()) {
      perception_ = perception_from_json(cached_data(stage::perception));
    }
    return *perception_;
  }

  scale_product& scaled() {
    if (!scaled_.has_value()) {
      scaled_ = scale_from_json(cached_data(stage::scale));
    }
    return *scaled_;
  }

  variant_scores& composed() {
    if (!composed_.has_value()) {
      composed_ = scores_from_json(cached_data(stage::compose));
    }
    return *composed_;
  }

  index::comparison_report& compared() {
    if (!compared_.has_value()) {
      compared_ = comparison_from_json(cached_data(stage::compare));
    }
    return *compared_;
  }

  // ---- stage bodies --------------------------------------------------------

  std::vector<std::vector<sample_point>> compute_samples() {
    auto out = std::vector<std::vector<sample_point>>{};
    auto const& data = cities();
    for (auto i = std::size_t{0}; i != data.size(); ++i) {
      out.push_back(sample_city(data[i], cfg_.cities_[i].n_, cfg_.seed_,
                                cfg_.bind_distance_));
    }
    return out;
  }

  std::vector<raw_row> compute_raw() {
    auto out = std::vector<raw_row>{};
    auto const& data = cities();
    auto const& pts = samples();
    auto const p = extraction_params_of(cfg_);
    for (auto i = std::size_t{0}; i != data.size(); ++i) {
      auto rows = extract_city(data[i], pts.at(i), reg_, p, nullptr,
                               cfg_.threads_);
      std::move(begin(rows), end(rows), std::back_inserter(out));
    }
    return out;
  }

  perception_product compute_perception() {
    auto product = perception_product{};
    auto records = std::vector<ingest::feature_record>{};
    for (auto const& c : cities()) {
      records.insert(end(records), begin(c.records_), end(c.records_));
    }
    auto const x = perception::assemble_features(records);
    auto index_of = std::map<std::string, std::size_t>{};
    for (auto i = std::size_t{0}; i != x.rows(); ++i) {
      index_of.emplace(x.ids_[i], i);
    }

    auto responses = std::vector<ingest::survey_response>{};
    if (cfg_.survey_.has_value()) {
      responses = ingest::load_survey_responses(*cfg_.survey_, w_);
    }
    auto const scores = perception::aggregate_survey(responses,
                                                     cfg_.mad_threshold_);
    auto unknown = std::size_t{0};
    for (auto const& [id, row] : scores.rows_) {
      unknown += index_of.contains(id) ? 0U : 1U;
    }
    if (unknown != 0) {
      warn(w_, fmt::format("{} surveyed image(s) have no feature record",
                           unknown));
    }

    for (auto const& id : x.ids_) {
      product.table_[id] = {};
    }
    for (auto const d : ingest::kDimensions) {
      auto const di = static_cast<std::size_t>(d);
      auto rows = std::vector<double>{};
      auto y = std::vector<double>{};
      for (auto const& [id, row] : scores.rows_) {
        auto const it = index_of.find(id);
        if (it == end(index_of) || !row[di].has_value()) {
          continue;
        }
        auto const r = x.row(it->second);
        rows.insert(end(rows), r.begin(), r.end());
        y.push_back(row[di]->mean_);
      }
      auto predictions = std::map<std::string, double>{};
      if (y.size() >= 10) {
        auto const view = perception::matrix_view{rows, y.size(), x.cols()};
        auto res = perception::train_regressor(view, y, cfg_.regressor_, w_);
        res.model_.features_.assign(begin(perception::kFeatureNames),
                                    end(perception::kFeatureNames));
        predictions = perception::predict_scores(res.model_, x);
        product.metrics_.push_back(
            {std::string{ingest::to_string(d)}, res.metrics_});
        product.models_.emplace(std::string{ingest::to_string(d)},
                                perception::to_json(res.model_));
      } else if (!records.empty()) {
        warn(w_, fmt::format("perception '{}': {} surveyed image(s), no model "
                             "trained",
                             ingest::to_string(d), y.size()));
      }
      for (auto const& id : x.ids_) {
        auto const survey = scores.mean(id, d);
        auto const it = predictions.find(id);
        product.table_[id][di] =
            survey.has_value() ? survey
            : it != end(predictions) ? std::optional{it->second}
                                     : std::nullopt;
      }
    }
    if (x.rows() != 0 && !scores.rows_.empty()) {
      product.ttests_ =
          perception::feature_score_analysis(x, scores, cfg_.alpha_);
    }
    return product;
  }

  scale_product compute_scaled() {
    auto rows = raw();
    auto const& table = perception().table_;
    for (auto& r : rows) {
      if (!r.image_id_.has_value()) {
        continue;
      }
      auto const it = table.find(*r.image_id_);
      if (it == end(table)) {
        continue;
      }
      for (auto i = std::size_t{0}; i != reg_.size(); ++i) {
        if (auto const d = indicators::perception_dimension(
                reg_.specs_[i].extraction_);
            d.has_value()) {
          r.values_[i] = it->second[static_cast<std::size_t>(*d)];
        }
      }
    }
    auto a = indicators::assemble_all(reg_, rows, cfg_.scope_,
                                      cfg_.max_missing_, w_);
    return {std::move(a.vectors_), std::move(a.dropped_)};
  }

  variant_scores compute_composed() {
    auto out = variant_scores{};
    for (auto const v : index::kVariants) {
      out[v] = index::compose_all(scaled().vectors_, reg_, v);
    }
    return out;
  }

  variant_scores compare_input() {
    auto out = variant_scores{};
    for (auto const v : cfg_.variants_) {
      out[v] = composed().at(v);
    }
    return out;
  }

  json export_all() {
    auto const& out_dir = cfg_.output_dir_;
    auto const& s = scaled();
    auto const& p = perception();
    export_geojson(s.vectors_, reg_, composed(), out_dir / "bikeability.geojson");
    export_reports(p.metrics_, p.ttests_, compared(),
                   summary_statistics(composed().at(index::variant::all)),
                   out_dir);
    auto dropped = std::string{"point_id\n"};
    for (auto const& id : s.dropped_) {
      dropped += ingest::csv_escape(id) + "\n";
    }
    write_text(out_dir / "dropped_points.csv", dropped);

    auto files = std::vector<std::string>{
        "bikeability.geojson",   "perception_metrics.csv",
        "feature_ttests.csv",    "variant_comparison.csv",
        "summary_statistics.csv", "dropped_points.csv"};
    for (auto const& [dim, model] : p.models_) {
      auto const rel = fmt::format("models/{}.json", dim);
      write_text(out_dir / rel, model.dump(2) + "\n");
      files.push_back(rel);
    }
    auto digests = json::object();
    for (auto const& f : files) {
      digests[f] = file_digest(out_dir / f);
    }
    return {{"files", digests}};
  }

  run_config const& cfg_;
  warnings* w_;
  indicators::registry reg_;
  fs::path cache_dir_;
  std::map<stage, std::string> digest_;

  std::optional<std::vector<city_data>> cities_;
  std::optional<std::vector<std::vector<sample_point>>> samples_;
  std::optional<std::vector<raw_row>> raw_;
  std::optional<perception_product> perception_;
  std::optional<scale_product> scaled_;
  std::optional<variant_scores> composed_;
  std::optional<index::comparison_report> compared_;
};

}  // namespace

run_report run_pipeline(run_config const& cfg, stage const last, warnings* w) {
  validate(cfg);
  auto r = runner{cfg, w};
  return r.run(last);
}

}  // namespace bike::pipeline
