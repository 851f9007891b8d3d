#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bike/indicators/assemble.h"
#include "bike/indicators/extract.h"
#include "bike/ingest/aqi.h"
#include "bike/ingest/dem.h"
#include "bike/ingest/feature_record.h"
#include "bike/ingest/land_use.h"
#include "bike/ingest/street_graph.h"
#include "bike/pipeline/config.h"
#include "bike/sampling/sampling.h"
#include "bike/warnings.h"

namespace bike::pipeline {

enum class stage {
  ingest,
  sample,
  extract,
  perception,
  scale,
  compose,
  compare,
  export_results,
};

constexpr auto kStages =
    std::array{stage::ingest,     stage::sample, stage::extract,
               stage::perception, stage::scale,  stage::compose,
               stage::compare,    stage::export_results};

std::string_view to_string(stage);
std::optional<stage> parse_stage(std::string_view);

enum class stage_status { computed, cached };

struct stage_report {
  stage stage_{stage::ingest};
  stage_status status_{stage_status::computed};
  std::string digest_;
};

struct run_report {
  std::vector<stage_report> stages_;
};

// Runs every stage up to and including `last`. Each stage stores its product
// under <output_dir>/cache and is skipped when its input digest is unchanged.
// Failures are rethrown with the stage name prefixed; caches of finished
// stages are kept.
run_report run_pipeline(run_config const& cfg,
                        stage last = stage::export_results,
                        warnings* w = nullptr);

// ---- building blocks, also used directly by the benchmarks -----------------

struct city_data {
  std::string name_;
  ingest::street_graph graph_;
  std::optional<ingest::land_use_dataset> land_use_;
  std::optional<ingest::dem_grid> dem_;
  std::vector<ingest::aqi_station> stations_;
  std::vector<ingest::feature_record> records_;
};

city_data load_city(city_config const& c, warnings* w = nullptr);

indicators::registry load_registry(run_config const& cfg);
indicators::extraction_params extraction_params_of(run_config const& cfg);

// Point ids become "<city>/<node id>".
std::vector<sampling::sample_point> sample_city(city_data const& city,
                                                std::size_t n,
                                                std::uint64_t seed,
                                                double bind_distance);

// Raw values of every registry entry; perception entries come from
// `perception` when given.
std::vector<indicators::raw_row> extract_city(
    city_data const& city, std::span<sampling::sample_point const> points,
    indicators::registry const& reg, indicators::extraction_params const& p,
    indicators::perception_table const* perception, std::size_t threads);

}  // namespace bike::pipeline
