#include "bike/perception/survey_stats.h"

#include <algorithm>
#include <cmath>

#include "bike/error.h"

namespace bike::perception {

double median(std::span<double const> values) {
  if (values.empty()) {
    fail(error_kind::invalid_argument, "median of an empty list");
  }
  auto v = std::vector<double>(values.begin(), values.end());
  auto const mid = v.size() / 2;
  std::nth_element(begin(v), begin(v) + static_cast<std::ptrdiff_t>(mid), end(v));
  auto const upper = v[mid];
  if (v.size() % 2 == 1) {
    return upper;
  }
  auto const lower = *std::max_element(begin(v), begin(v) + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

double mad(std::span<double const> values) {
  auto const m = median(values);
  auto dev = std::vector<double>{};
  dev.reserve(values.size());
  for (auto const x : values) {
    dev.push_back(std::abs(x - m));
  }
  return median(dev);
}

std::vector<double> filter_outliers(std::span<double const> values,
                                    double const threshold) {
  auto const m = median(values);
  auto const d = mad(values);
  if (d == 0.0) {
    return {values.begin(), values.end()};
  }
  auto out = std::vector<double>{};
  for (auto const x : values) {
    if (std::abs(x - m) / d <= threshold) {
      out.push_back(x);
    }
  }
  return out;
}

std::optional<double> score_table::mean(std::string const& image_id,
                                        ingest::dimension const d) const {
  auto const it = rows_.find(image_id);
  if (it == end(rows_)) {
    return std::nullopt;
  }
  auto const& cell = it->second[static_cast<std::size_t>(d)];
  return cell.has_value() ? std::optional{cell->mean_} : std::nullopt;
}

score_table aggregate_survey(std::span<ingest::survey_response const> responses,
                             double const threshold) {
  using key_t = std::pair<std::string, std::size_t>;
  auto ratings = std::map<key_t, std::vector<double>>{};
  for (auto const& r : responses) {
    ratings[{r.image_id_, static_cast<std::size_t>(r.dimension_)}].push_back(
        static_cast<double>(r.rating_));
  }

  auto t = score_table{};
  for (auto& [key, values] : ratings) {
    // Sorting makes the floating-point mean independent of response order.
    std::sort(begin(values), end(values));
    auto const kept = filter_outliers(values, threshold);
    auto sum = 0.0;
    for (auto const x : kept) {
      sum += x;
    }
    t.rows_[key.first][key.second] =
        score_cell{sum / static_cast<double>(kept.size()), kept.size(),
                   values.size()};
  }
  return t;
}

}  // namespace bike::perception
