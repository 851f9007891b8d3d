#include "bike/ingest/feature_record.h"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/ingest/csv.h"
#include "bike/ingest/street_graph.h"

namespace bike::ingest {

using nlohmann::json;

double feature_record::seg(std::string_view const cls) const {
  auto const it = seg_fraction_.find(cls);
  return it == end(seg_fraction_) ? 0.0 : it->second;
}

std::int64_t feature_record::count(std::string_view const cls) const {
  auto const it = object_count_.find(cls);
  return it == end(object_count_) ? 0 : it->second;
}

double feature_record::scene(std::string_view const label) const {
  auto const it = scene_prob_.find(label);
  return it == end(scene_prob_) ? 0.0 : it->second;
}

namespace {

json const& require(json const& obj, char const* field, std::string_view id) {
  auto const it = obj.find(field);
  if (it == obj.end() || it->is_null()) {
    fail(error_kind::validation_error,
         fmt::format("feature record '{}': missing field '{}'", id, field));
  }
  return *it;
}

double number(json const& v, std::string_view id, std::string_view field) {
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    fail(error_kind::validation_error,
         fmt::format("feature record '{}': field '{}' must be a finite number",
                     id, field));
  }
  return v.get<double>();
}

}  // namespace

feature_record parse_feature_record(json const& obj) {
  if (!obj.is_object()) {
    fail(error_kind::validation_error, "feature record must be a JSON object");
  }
  auto r = feature_record{};
  auto const& id = require(obj, "image_id", "?");
  if (!id.is_string() || id.get<std::string>().empty()) {
    fail(error_kind::validation_error,
         "feature record: image_id must be a non-empty string");
  }
  r.image_id_ = id.get<std::string>();

  auto const& loc = require(obj, "location", r.image_id_);
  auto const lon = number(require(loc, "lon", r.image_id_), r.image_id_, "lon");
  auto const lat = number(require(loc, "lat", r.image_id_), r.image_id_, "lat");
  r.location_ = {lon, lat};
  if (!geo::is_valid(r.location_)) {
    fail(error_kind::validation_error,
         fmt::format("feature record '{}': location out of range", r.image_id_));
  }

  auto const& seg = require(obj, "seg_fraction", r.image_id_);
  if (!seg.is_object()) {
    fail(error_kind::validation_error,
         fmt::format("feature record '{}': seg_fraction must be an object",
                     r.image_id_));
  }
  auto total = 0.0;
  for (auto const& [cls, v] : seg.items()) {
    auto const f = number(v, r.image_id_, "seg_fraction." + cls);
    if (f < 0.0 || f > 1.0) {
      fail(error_kind::validation_error,
           fmt::format("feature record '{}': seg_fraction of class '{}' is {} "
                       "(must be within [0,1])",
                       r.image_id_, cls, f));
    }
    total += f;
    r.seg_fraction_.emplace(cls, f);
  }
  if (total > 1.0 + 1e-6) {
    fail(error_kind::validation_error,
         fmt::format("feature record '{}': seg_fraction sums to {} > 1",
                     r.image_id_, total));
  }

  if (auto const it = obj.find("object_count");
      it != obj.end() && !it->is_null()) {
    for (auto const& [cls, v] : it->items()) {
      auto const c = number(v, r.image_id_, "object_count." + cls);
      if (c < 0.0 || c != std::floor(c)) {
        fail(error_kind::validation_error,
             fmt::format("feature record '{}': object_count of '{}' must be "
                         "a non-negative integer",
                         r.image_id_, cls));
      }
      r.object_count_.emplace(cls, static_cast<std::int64_t>(c));
    }
  }

  if (auto const it = obj.find("scene_prob");
      it != obj.end() && !it->is_null()) {
    for (auto const& [label, v] : it->items()) {
      auto const p = number(v, r.image_id_, "scene_prob." + label);
      if (p < 0.0 || p > 1.0) {
        fail(error_kind::validation_error,
             fmt::format("feature record '{}': scene_prob of '{}' is {} "
                         "(must be within [0,1])",
                         r.image_id_, label, p));
      }
      r.scene_prob_.emplace(label, p);
    }
  }

  for (auto const* field : kLowLevelFields) {
    if (auto const it = obj.find(field); it != obj.end() && !it->is_null()) {
      r.lowlevel_.emplace(field, number(*it, r.image_id_, field));
    }
  }
  if (auto const it = r.lowlevel_.find("canny_edge_llf");
      it != end(r.lowlevel_) && (it->second < 0.0 || it->second > 1.0)) {
    fail(error_kind::validation_error,
         fmt::format("feature record '{}': canny_edge_llf must be within [0,1]",
                     r.image_id_));
  }
  if (auto const it = r.lowlevel_.find("no_of_blobs_llf");
      it != end(r.lowlevel_) && it->second < 0.0) {
    fail(error_kind::validation_error,
         fmt::format("feature record '{}': no_of_blobs_llf must be >= 0",
                     r.image_id_));
  }
  return r;
}

json to_json(feature_record const& r) {
  auto obj = json{{"image_id", r.image_id_},
                  {"location", {{"lon", r.location_.lon_},
                                {"lat", r.location_.lat_}}},
                  {"seg_fraction", json::object()},
                  {"object_count", json::object()},
                  {"scene_prob", json::object()}};
  for (auto const& [k, v] : r.seg_fraction_) {
    obj["seg_fraction"][k] = v;
  }
  for (auto const& [k, v] : r.object_count_) {
    obj["object_count"][k] = v;
  }
  for (auto const& [k, v] : r.scene_prob_) {
    obj["scene_prob"][k] = v;
  }
  for (auto const& [k, v] : r.lowlevel_) {
    obj[k] = v;
  }
  return obj;
}

std::vector<feature_record> parse_feature_records(std::string_view text) {
  auto out = std::vector<feature_record>{};
  auto seen = std::set<std::string, std::less<>>{};
  auto line_no = std::size_t{0};
  while (!text.empty()) {
    ++line_no;
    auto const nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      continue;
    }
    auto const obj = parse_json_with_context(
        line, fmt::format("feature records line {}", line_no));
    auto r = parse_feature_record(obj);
    if (!seen.insert(r.image_id_).second) {
      fail(error_kind::validation_error,
           fmt::format("feature records line {}: duplicate image_id '{}'",
                       line_no, r.image_id_));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<feature_record> load_feature_records(
    std::filesystem::path const& path) {
  return parse_feature_records(read_file(path));
}

void write_feature_records(std::vector<feature_record> const& records,
                           std::filesystem::path const& path) {
  auto out = std::ofstream{path, std::ios::binary};
  if (!out) {
    fail(error_kind::io_error,
         fmt::format("cannot write '{}'", path.string()));
  }
  for (auto const& r : records) {
    out << to_json(r).dump() << '\n';
  }
}

}  // namespace bike::ingest
