#include "bike/perception/features.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string_view>

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::perception {

namespace seg = ingest::seg;

namespace {

using namespace std::string_view_literals;

constexpr auto kSlum = std::array{"slum"sv, "alley"sv, "junkyard"sv};
constexpr auto kMarket = std::array{"bazaar"sv, "flea_market"sv, "market"sv};
constexpr auto kBuiltOther = std::array{"downtown"sv, "embassy"sv, "plaza"sv};
constexpr auto kGreenOther = std::array{"forest_path"sv, "forest_road"sv};

constexpr auto kObjects =
    std::array{"bicycle"sv, "bus"sv, "car"sv, "motorcycle"sv,
               "person"sv,  "traffic_light"sv, "truck"sv};

// Classes with a column of their own; everything else is "others".
constexpr auto kNamedSeg = std::array{std::string_view{seg::kGreenery},
                                      std::string_view{seg::kSky},
                                      std::string_view{seg::kStreet},
                                      std::string_view{seg::kSidewalk},
                                      std::string_view{seg::kBuilding}};

template <std::size_t N>
double scene_sum(ingest::feature_record const& r,
                 std::array<std::string_view, N> const& labels) {
  auto s = 0.0;
  for (auto const l : labels) {
    s += r.scene(l);
  }
  return s;
}

}  // namespace

std::optional<std::size_t> feature_index(std::string_view const name) {
  for (auto i = std::size_t{0}; i != kFeatureNames.size(); ++i) {
    if (kFeatureNames[i] == name) {
      return i;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> feature_matrix::find(
    std::string_view const image_id) const {
  for (auto i = std::size_t{0}; i != ids_.size(); ++i) {
    if (ids_[i] == image_id) {
      return i;
    }
  }
  return std::nullopt;
}

double seg_entropy(
    std::map<std::string, double, std::less<>> const& seg_fraction) {
  auto total = 0.0;
  for (auto const& [cls, f] : seg_fraction) {
    if (f > 0.0) {
      total += f;
    }
  }
  if (total <= 0.0) {
    return 0.0;
  }
  auto h = 0.0;
  for (auto const& [cls, f] : seg_fraction) {
    if (f > 0.0) {
      auto const p = f / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

std::array<double, kFeatureCount> feature_row(ingest::feature_record const& r) {
  auto row = std::array<double, kFeatureCount>{};
  auto others = 0.0;
  for (auto const& [cls, f] : r.seg_fraction_) {
    if (std::find(begin(kNamedSeg), end(kNamedSeg), cls) == end(kNamedSeg)) {
      others += f;
    }
  }
  row[0] = r.seg(seg::kGreenery);
  row[1] = r.seg(seg::kSky);
  row[2] = r.seg(seg::kStreet) + r.seg(seg::kSidewalk);
  row[3] = r.seg(seg::kBuilding);
  row[4] = others;
  row[5] = r.seg(seg::kGreenery) + r.seg(seg::kSky) + r.seg(seg::kWater) +
           r.seg(seg::kTerrain);
  row[6] = seg_entropy(r.seg_fraction_);
  row[7] = scene_sum(r, kSlum);
  row[8] = scene_sum(r, kMarket);
  row[9] = scene_sum(r, kBuiltOther);
  row[10] = scene_sum(r, kGreenOther);
  for (auto i = std::size_t{0}; i != kObjects.size(); ++i) {
    row[11 + i] = static_cast<double>(r.count(kObjects[i]));
  }
  for (auto i = std::size_t{0}; i != ingest::kLowLevelFields.size(); ++i) {
    auto const* name = ingest::kLowLevelFields[i];
    auto const it = r.lowlevel_.find(std::string_view{name});
    if (it == end(r.lowlevel_)) {
      fail(error_kind::validation_error,
           fmt::format("image '{}': missing field '{}'", r.image_id_, name));
    }
    if (!std::isfinite(it->second)) {
      fail(error_kind::validation_error,
           fmt::format("image '{}': field '{}' is not finite", r.image_id_,
                       name));
    }
    row[18 + i] = it->second;
  }
  return row;
}

feature_matrix assemble_features(
    std::span<ingest::feature_record const> records) {
  auto m = feature_matrix{};
  auto seen = std::set<std::string_view>{};
  m.ids_.reserve(records.size());
  m.values_.reserve(records.size() * kFeatureCount);
  for (auto const& r : records) {
    if (!seen.insert(r.image_id_).second) {
      fail(error_kind::validation_error,
           fmt::format("duplicate image_id '{}'", r.image_id_));
    }
    auto const row = feature_row(r);
    m.ids_.push_back(r.image_id_);
    m.values_.insert(end(m.values_), begin(row), end(row));
  }
  return m;
}

}  // namespace bike::perception
