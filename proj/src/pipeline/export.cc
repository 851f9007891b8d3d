#include "bike/pipeline/export.h"

#include <fstream>

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/ingest/csv.h"
#include "bike/ingest/street_graph.h"

namespace bike::pipeline {

namespace fs = std::filesystem;

namespace {

std::string fixed6(double const v) {
  auto s = fmt::format("{:.6f}", v);
  if (s == "-0.000000") {
    s = "0.000000";
  }
  return s;
}

std::string num(double const v) { return fmt::format("{:.10g}", v); }

std::string opt_num(std::optional<double> const& v) {
  return v.has_value() ? num(*v) : std::string{};
}

std::string json_string(std::string_view s) {
  return nlohmann::json(s).dump();
}

}  // namespace

void write_text(fs::path const& path, std::string_view const text) {
  auto ec = std::error_code{};
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
  }
  auto out = std::ofstream{path, std::ios::binary | std::ios::trunc};
  if (!out) {
    fail(error_kind::io_error,
         fmt::format("cannot write '{}'", path.string()));
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) {
    fail(error_kind::io_error,
         fmt::format("failed writing '{}'", path.string()));
  }
}

std::string geojson_text(std::span<indicators::indicator_vector const> vectors,
                         indicators::registry const& reg,
                         variant_scores const& scores) {
  auto const scores_of = [&](index::variant const v)
      -> std::vector<index::composite_score> const& {
    auto const it = scores.find(v);
    if (it == end(scores) || it->second.size() != vectors.size()) {
      fail(error_kind::alignment_error,
           fmt::format("scores for variant '{}' are not aligned with the "
                       "indicator vectors",
                       index::to_string(v)));
    }
    return it->second;
  };
  auto const& all = scores_of(index::variant::all);
  auto const& svi = scores_of(index::variant::svi_only);
  auto const& nonsvi = scores_of(index::variant::non_svi_only);

  auto out = std::string{"{\"type\":\"FeatureCollection\",\"features\":["};
  for (auto i = std::size_t{0}; i != vectors.size(); ++i) {
    auto const& v = vectors[i];
    for (auto const* s : {&all[i], &svi[i], &nonsvi[i]}) {
      if (s->point_id_ != v.point_id_) {
        fail(error_kind::alignment_error,
             fmt::format("score for '{}' found where '{}' was expected",
                         s->point_id_, v.point_id_));
      }
    }
    if (i != 0) {
      out += ',';
    }
    out += "\n{\"type\":\"Feature\",\"geometry\":{\"type\":\"Point\","
           "\"coordinates\":[";
    out += fixed6(v.location_.lon_);
    out += ',';
    out += fixed6(v.location_.lat_);
    out += "]},\"properties\":{\"point_id\":";
    out += json_string(v.point_id_);
    for (auto k = std::size_t{0}; k != reg.size(); ++k) {
      if (!v.values_[k].has_value()) {
        fail(error_kind::invalid_argument,
             fmt::format("point '{}': indicator '{}' missing at export",
                         v.point_id_, reg.specs_[k].name_));
      }
      out += fmt::format(",\"ind_{}\":{}", reg.specs_[k].name_,
                         fixed6(*v.values_[k]));
    }
    for (auto c = std::size_t{0}; c != index::kCategoryCount; ++c) {
      out += fmt::format(",\"cat_{}\":{}",
                         indicators::to_string(indicators::kCategories[c]),
                         fixed6(all[i].category_[c].value_or(0.0)));
    }
    out += fmt::format(",\"bikeability_all\":{}", fixed6(all[i].total_));
    out += fmt::format(",\"bikeability_svi\":{}", fixed6(svi[i].total_));
    out += fmt::format(",\"bikeability_nonsvi\":{}", fixed6(nonsvi[i].total_));
    out += "}}";
  }
  out += "\n]}\n";
  return out;
}

void export_geojson(std::span<indicators::indicator_vector const> vectors,
                    indicators::registry const& reg,
                    variant_scores const& scores, fs::path const& path) {
  write_text(path, geojson_text(vectors, reg, scores));
}

std::vector<exported_point> load_scores_geojson(fs::path const& path) {
  auto const j =
      ingest::parse_json_with_context(ingest::read_file(path), path.string());
  auto out = std::vector<exported_point>{};
  try {
    for (auto const& f : j.at("features")) {
      auto p = exported_point{};
      auto const& c = f.at("geometry").at("coordinates");
      p.location_ = {c.at(0).get<double>(), c.at(1).get<double>()};
      for (auto const& [k, v] : f.at("properties").items()) {
        if (k == "point_id") {
          p.point_id_ = v.get<std::string>();
        } else {
          p.properties_.emplace(k, v.get<double>());
        }
      }
      out.push_back(std::move(p));
    }
  } catch (nlohmann::json::exception const& e) {
    fail(error_kind::parse_error,
         fmt::format("{}: malformed score GeoJSON: {}", path.string(),
                     e.what()));
  }
  return out;
}

std::vector<category_summary> summary_statistics(
    std::span<index::composite_score const> scores) {
  auto by_city = std::map<std::string, std::vector<index::composite_score const*>>{};
  for (auto const& s : scores) {
    by_city[s.city_].push_back(&s);
  }
  auto out = std::vector<category_summary>{};
  auto const add = [&](std::string const& city, std::string_view name,
                       std::vector<double> const& v) {
    if (!v.empty()) {
      out.push_back({city, std::string{name}, index::mean(v),
                     index::sample_sd(v)});
    }
  };
  for (auto const& [city, list] : by_city) {
    for (auto c = std::size_t{0}; c != index::kCategoryCount; ++c) {
      auto v = std::vector<double>{};
      for (auto const* s : list) {
        if (s->category_[c].has_value()) {
          v.push_back(*s->category_[c]);
        }
      }
      add(city, indicators::to_string(indicators::kCategories[c]), v);
    }
    auto total = std::vector<double>{};
    for (auto const* s : list) {
      total.push_back(s->total_);
    }
    add(city, "bikeability", total);
  }
  return out;
}

std::string perception_metrics_csv(std::span<dimension_metrics const> rows) {
  auto out = std::string{"dimension,MAE,MAPE,RMSE,R2\n"};
  for (auto const& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", ingest::csv_escape(r.dimension_),
                       num(r.metrics_.mae_), opt_num(r.metrics_.mape_),
                       num(r.metrics_.rmse_), num(r.metrics_.r2_));
  }
  return out;
}

std::string feature_ttests_csv(std::span<perception::ttest_result const> rows) {
  auto out = std::string{
      "feature,dimension,n_above,n_below,mean_above,mean_below,t,df,p,"
      "significant\n"};
  for (auto const& r : rows) {
    auto const maybe = [&](double const v) {
      return r.computable_ ? num(v) : std::string{};
    };
    out += fmt::format(
        "{},{},{},{},{},{},{},{},{},{}\n", ingest::csv_escape(r.feature_),
        ingest::csv_escape(r.dimension_), r.n_a_, r.n_b_,
        r.n_a_ != 0 ? num(r.mean_a_) : std::string{},
        r.n_b_ != 0 ? num(r.mean_b_) : std::string{}, maybe(r.t_),
        maybe(r.df_), maybe(r.p_), r.significant_ ? 1 : 0);
  }
  return out;
}

std::string variant_comparison_csv(index::comparison_report const& report) {
  auto out = std::string{"variant_a,variant_b,metric,value\n"};
  for (auto const& p : report.pairs_) {
    auto const a = index::to_string(p.a_);
    auto const b = index::to_string(p.b_);
    out += fmt::format("{},{},r,{}\n", a, b, opt_num(p.r_));
    out += fmt::format("{},{},r2,{}\n", a, b, opt_num(p.r2_));
  }
  for (auto const& s : report.summaries_) {
    auto const a = index::to_string(s.variant_);
    out += fmt::format("{},,n,{}\n", a, s.n_);
    out += fmt::format("{},,mean,{}\n", a, num(s.mean_));
    out += fmt::format("{},,sd,{}\n", a, num(s.sd_));
    out += fmt::format("{},,excess_kurtosis,{}\n", a,
                       opt_num(s.excess_kurtosis_));
  }
  return out;
}

std::string summary_statistics_csv(std::span<category_summary const> rows) {
  auto out = std::string{"city,category,mean,sd\n"};
  for (auto const& r : rows) {
    out += fmt::format("{},{},{},{}\n", ingest::csv_escape(r.city_),
                       ingest::csv_escape(r.category_), num(r.mean_),
                       num(r.sd_));
  }
  return out;
}

void export_reports(std::span<dimension_metrics const> metrics,
                    std::span<perception::ttest_result const> ttests,
                    index::comparison_report const& comparison,
                    std::span<category_summary const> summaries,
                    fs::path const& dir) {
  write_text(dir / "perception_metrics.csv", perception_metrics_csv(metrics));
  write_text(dir / "feature_ttests.csv", feature_ttests_csv(ttests));
  write_text(dir / "variant_comparison.csv",
             variant_comparison_csv(comparison));
  write_text(dir / "summary_statistics.csv",
             summary_statistics_csv(summaries));
}

}  // namespace bike::pipeline
