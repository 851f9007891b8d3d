#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bike/ingest/feature_record.h"

namespace bike::perception {

constexpr auto kFeatureCount = std::size_t{26};

constexpr auto kFeatureNames = std::array<char const*, kFeatureCount>{
    "tree_ss",           "sky_ss",           "street_ss",
    "built_ss",          "others_ss",        "nature",
    "shannon",           "slum_ic",          "market_ic",
    "built_other_ic",    "green_other_ic",   "bicycle_od",
    "bus_od",            "car_od",           "motorcycle_od",
    "person_od",         "traffic_light_od", "truck_od",
    "canny_edge_llf",    "no_of_blobs_llf",  "hue_mean_llf",
    "hue_std_llf",       "lightness_mean_llf", "lightness_std_llf",
    "saturation_mean_llf", "saturation_std_llf"};

std::optional<std::size_t> feature_index(std::string_view name);

// Row-major dense matrix with one row per image.
struct feature_matrix {
  std::size_t rows() const { return ids_.size(); }
  std::size_t cols() const { return kFeatureCount; }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * kFeatureCount + c];
  }
  std::span<double const> row(std::size_t const r) const {
    return {values_.data() + r * kFeatureCount, kFeatureCount};
  }
  std::optional<std::size_t> find(std::string_view image_id) const;

  std::vector<std::string> ids_;
  std::vector<double> values_;
};

// Shannon entropy (natural log) of the strictly positive fractions after
// renormalising them to sum 1. No positive fraction -> 0.
double seg_entropy(
    std::map<std::string, double, std::less<>> const& seg_fraction);

std::array<double, kFeatureCount> feature_row(ingest::feature_record const& r);

// Missing low-level field or duplicate image_id -> validation-error.
feature_matrix assemble_features(std::span<ingest::feature_record const> records);

}  // namespace bike::perception
