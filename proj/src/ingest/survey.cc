#include "bike/ingest/survey.h"

#include <map>
#include <tuple>

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/ingest/csv.h"

namespace bike::ingest {

std::string_view to_string(dimension const d) {
  switch (d) {
    case dimension::cycling_attractiveness: return "cycling_attractiveness";
    case dimension::spaciousness: return "spaciousness";
    case dimension::cleanliness: return "cleanliness";
    case dimension::building_attractiveness: return "building_attractiveness";
    case dimension::safety: return "safety";
    case dimension::beauty: return "beauty";
    case dimension::living_attractiveness: return "living_attractiveness";
  }
  return "?";
}

std::optional<dimension> parse_dimension(std::string_view const s) {
  for (auto const d : kDimensions) {
    if (to_string(d) == s) {
      return d;
    }
  }
  return std::nullopt;
}

std::vector<survey_response> parse_survey_responses(std::string_view const text,
                                                    warnings* w) {
  auto const table = parse_csv(text);
  auto const c_image = table.column("image_id");
  auto const c_rater = table.column("rater_id");
  auto const c_dim = table.column("dimension");
  auto const c_rating = table.column("rating");

  auto out = std::vector<survey_response>{};
  auto position =
      std::map<std::tuple<std::string, std::string, dimension>, std::size_t>{};
  for (auto const& row : table.rows_) {
    auto const& f = row.fields_;
    auto const dim = parse_dimension(f[c_dim]);
    if (!dim.has_value()) {
      fail(error_kind::validation_error,
           fmt::format("line {}: unknown perception dimension '{}'", row.line_,
                       f[c_dim]));
    }
    auto const rating = parse_int(f[c_rating]);
    if (!rating.has_value() || *rating < 0 || *rating > 10) {
      fail(error_kind::validation_error,
           fmt::format("line {}: rating '{}' is not an integer in [0,10]",
                       row.line_, f[c_rating]));
    }
    if (f[c_image].empty() || f[c_rater].empty()) {
      fail(error_kind::validation_error,
           fmt::format("line {}: empty image_id or rater_id", row.line_));
    }
    auto r = survey_response{f[c_image], f[c_rater], *dim,
                             static_cast<int>(*rating)};
    auto const key = std::tuple{r.image_id_, r.rater_id_, r.dimension_};
    if (auto const it = position.find(key); it != end(position)) {
      warn(w, fmt::format("line {}: duplicate rating of image '{}' by rater "
                          "'{}' on {}; keeping the last one",
                          row.line_, r.image_id_, r.rater_id_,
                          to_string(r.dimension_)));
      out[it->second] = std::move(r);
      continue;
    }
    position.emplace(key, out.size());
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<survey_response> load_survey_responses(
    std::filesystem::path const& path, warnings* w) {
  return parse_survey_responses(read_file(path), w);
}

}  // namespace bike::ingest
