#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bike/index/compare.h"
#include "bike/index/composite.h"
#include "bike/indicators/assemble.h"
#include "bike/perception/regression.h"
#include "bike/perception/ttest.h"

namespace bike::pipeline {

using variant_scores = std::map<index::variant, std::vector<index::composite_score>>;

// FeatureCollection of points with point_id, ind_<name>, cat_<category>
// (variant all) and bikeability_{all,svi,nonsvi}; numbers at 6 decimals.
// Every variant list must be aligned with `vectors`.
std::string geojson_text(std::span<indicators::indicator_vector const> vectors,
                         indicators::registry const& reg,
                         variant_scores const& scores);
void export_geojson(std::span<indicators::indicator_vector const> vectors,
                    indicators::registry const& reg,
                    variant_scores const& scores,
                    std::filesystem::path const& path);

struct exported_point {
  std::string point_id_;
  geo::geo_point location_;
  std::map<std::string, double> properties_;
};
std::vector<exported_point> load_scores_geojson(std::filesystem::path const&);

struct dimension_metrics {
  std::string dimension_;
  perception::metrics metrics_;
};

struct category_summary {
  std::string city_;
  std::string category_;  // a category name or "bikeability"
  double mean_{0.0};
  double sd_{0.0};
};

// Per city, mean and sample sd of each category score and of the total.
std::vector<category_summary> summary_statistics(
    std::span<index::composite_score const> scores);

std::string perception_metrics_csv(std::span<dimension_metrics const>);
std::string feature_ttests_csv(std::span<perception::ttest_result const>);
std::string variant_comparison_csv(index::comparison_report const&);
std::string summary_statistics_csv(std::span<category_summary const>);

// Writes the four CSV files above into `dir`.
void export_reports(std::span<dimension_metrics const> metrics,
                    std::span<perception::ttest_result const> ttests,
                    index::comparison_report const& comparison,
                    std::span<category_summary const> summaries,
                    std::filesystem::path const& dir);

// Creates parent directories; io-error when the file cannot be written.
void write_text(std::filesystem::path const& path, std::string_view text);

}  // namespace bike::pipeline
