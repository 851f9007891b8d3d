#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bike/warnings.h"

namespace bike::ingest {

enum class dimension {
  cycling_attractiveness,
  spaciousness,
  cleanliness,
  building_attractiveness,
  safety,
  beauty,
  living_attractiveness,
};

constexpr auto kDimensions = std::array{
    dimension::cycling_attractiveness, dimension::spaciousness,
    dimension::cleanliness,            dimension::building_attractiveness,
    dimension::safety,                 dimension::beauty,
    dimension::living_attractiveness};

std::string_view to_string(dimension);
std::optional<dimension> parse_dimension(std::string_view);

struct survey_response {
  friend bool operator==(survey_response const&,
                         survey_response const&) = default;

  std::string image_id_;
  std::string rater_id_;
  dimension dimension_{dimension::beauty};
  int rating_{0};  // 0..10
};

// CSV header image_id,rater_id,dimension,rating. Ratings must be integers in
// [0,10]. A repeated (image, rater, dimension) keeps the last row and warns;
// the surviving row stays at the position of its first occurrence.
std::vector<survey_response> parse_survey_responses(std::string_view text,
                                                    warnings* w = nullptr);
std::vector<survey_response> load_survey_responses(
    std::filesystem::path const& path, warnings* w = nullptr);

}  // namespace bike::ingest
