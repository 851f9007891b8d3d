#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bike/ingest/survey.h"

namespace bike::perception {

// Even-length lists take the mean of the central pair. Empty -> invalid-argument.
double median(std::span<double const> values);

// Median absolute deviation from the median (no consistency constant).
double mad(std::span<double const> values);

// Keeps x with |x - median| / MAD <= threshold, in input order. MAD = 0 keeps
// everything. Empty input -> invalid-argument.
std::vector<double> filter_outliers(std::span<double const> values,
                                    double threshold = 3.0);

struct score_cell {
  double mean_{0.0};
  std::size_t retained_{0};
  std::size_t responses_{0};
};

using score_row = std::array<std::optional<score_cell>, ingest::kDimensions.size()>;

// image_id -> per-dimension mean of the retained ratings. Cells without
// responses stay empty.
struct score_table {
  std::optional<double> mean(std::string const& image_id,
                             ingest::dimension) const;

  std::map<std::string, score_row> rows_;
};

score_table aggregate_survey(std::span<ingest::survey_response const> responses,
                             double threshold = 3.0);

}  // namespace bike::perception
