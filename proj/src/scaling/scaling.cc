#include "bike/scaling/scaling.h"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::scaling {

using nlohmann::json;

std::string_view to_string(rule_kind const k) {
  switch (k) {
    case rule_kind::min_max: return "min_max";
    case rule_kind::neg_min_max: return "neg_min_max";
    case rule_kind::categorical: return "categorical";
    case rule_kind::width_over_10: return "width_over_10";
    case rule_kind::presence: return "presence";
  }
  return "?";
}

std::string_view to_string(scope const s) {
  return s == scope::pooled ? "pooled" : "per_city";
}

scope parse_scope(std::string_view const s) {
  if (s == "pooled") {
    return scope::pooled;
  }
  if (s == "per_city") {
    return scope::per_city;
  }
  fail(error_kind::configuration_error,
       fmt::format("unknown scaling scope '{}'", s));
}

void validate(scaling_rule const& r) {
  auto const in_unit = [](double const v) {
    return std::isfinite(v) && v >= 0.0 && v <= 1.0;
  };
  if (r.kind_ != rule_kind::categorical) {
    return;
  }
  for (auto const& [k, v] : r.categories_) {
    if (!in_unit(v)) {
      fail(error_kind::configuration_error,
           fmt::format("categorical value for '{}' is {} (must be in [0,1])",
                       k, v));
    }
  }
  if (!in_unit(r.default_)) {
    fail(error_kind::configuration_error,
         fmt::format("categorical default {} must be in [0,1]", r.default_));
  }
}

scaling_rule from_json(json const& j) {
  auto r = scaling_rule{};
  auto const kind = j.at("kind").get<std::string>();
  if (kind == "min_max") {
    r.kind_ = rule_kind::min_max;
  } else if (kind == "neg_min_max") {
    r.kind_ = rule_kind::neg_min_max;
  } else if (kind == "categorical") {
    r.kind_ = rule_kind::categorical;
    for (auto const& [k, v] : j.at("map").items()) {
      r.categories_.emplace(k, v.get<double>());
    }
    r.default_ = j.value("default", 0.0);
  } else if (kind == "width_over_10") {
    r.kind_ = rule_kind::width_over_10;
  } else if (kind == "presence") {
    r.kind_ = rule_kind::presence;
    r.invert_ = j.value("invert", false);
  } else {
    fail(error_kind::configuration_error,
         fmt::format("unknown scaling rule kind '{}'", kind));
  }
  validate(r);
  return r;
}

json to_json(scaling_rule const& r) {
  auto j = json{{"kind", to_string(r.kind_)}};
  if (r.kind_ == rule_kind::categorical) {
    j["map"] = json::object();
    for (auto const& [k, v] : r.categories_) {
      j["map"][k] = v;
    }
    j["default"] = r.default_;
  } else if (r.kind_ == rule_kind::presence) {
    j["invert"] = r.invert_;
  }
  return j;
}

std::optional<extrema> find_extrema(std::span<double const> values) {
  auto e = std::optional<extrema>{};
  for (auto const v : values) {
    if (!std::isfinite(v)) {
      continue;
    }
    if (!e.has_value()) {
      e = extrema{v, v};
    } else {
      e->min_ = std::min(e->min_, v);
      e->max_ = std::max(e->max_, v);
    }
  }
  return e;
}

std::optional<extrema> find_extrema(
    std::span<std::optional<double> const> values) {
  auto present = std::vector<double>{};
  for (auto const& v : values) {
    if (v.has_value()) {
      present.push_back(*v);
    }
  }
  return find_extrema(std::span<double const>{present});
}

double min_max_value(double const x, extrema const& e) {
  if (e.max_ == e.min_) {
    return 0.5;
  }
  return std::clamp((x - e.min_) / (e.max_ - e.min_), 0.0, 1.0);
}

std::vector<double> min_max(std::span<double const> values) {
  if (values.empty()) {
    fail(error_kind::invalid_argument, "min_max of an empty list");
  }
  if (std::any_of(values.begin(), values.end(),
                  [](double const v) { return !std::isfinite(v); })) {
    fail(error_kind::invalid_argument, "min_max input must be finite");
  }
  auto const e = *find_extrema(values);
  auto out = std::vector<double>{};
  out.reserve(values.size());
  for (auto const v : values) {
    out.push_back(min_max_value(v, e));
  }
  return out;
}

std::vector<double> neg_min_max(std::span<double const> values) {
  auto out = min_max(values);
  for (auto& v : out) {
    v = 1.0 - v;
  }
  return out;
}

double categorical_score(std::string_view const value,
                         scaling_rule const& rule) {
  auto const it = rule.categories_.find(value);
  return it == end(rule.categories_) ? rule.default_ : it->second;
}

double width_score(double const width_m) {
  if (!(width_m >= 0.0)) {
    fail(error_kind::validation_error,
         fmt::format("road width must be non-negative, got {}", width_m));
  }
  return std::min(width_m / 10.0, 1.0);
}

double presence_score(bool const present, bool const invert) {
  return present != invert ? 1.0 : 0.0;
}

double apply(scaling_rule const& rule, double const raw,
             std::optional<extrema> const& e) {
  switch (rule.kind_) {
    case rule_kind::min_max:
    case rule_kind::neg_min_max: {
      if (!e.has_value()) {
        fail(error_kind::configuration_error,
             "min-max scaling requested without extrema");
      }
      auto const v = min_max_value(raw, *e);
      return rule.kind_ == rule_kind::min_max ? v : 1.0 - v;
    }
    case rule_kind::categorical: return std::clamp(raw, 0.0, 1.0);
    case rule_kind::width_over_10: return width_score(raw);
    case rule_kind::presence: return presence_score(raw != 0.0, rule.invert_);
  }
  return raw;
}

scaling_rule road_type_rule() {
  auto r = scaling_rule{};
  r.kind_ = rule_kind::categorical;
  r.categories_ = {{"service", 0.1},        {"track", 0.1},
                   {"primary", 0.2},        {"primary_link", 0.2},
                   {"secondary", 0.4},      {"secondary_link", 0.4},
                   {"tertiary", 0.5},       {"tertiary_link", 0.5},
                   {"unclassified", 0.6},   {"pedestrian", 0.8},
                   {"path", 0.8},           {"cycleway", 1.0}};
  r.default_ = 0.0;
  return r;
}

scaling_rule pavement_rule() {
  auto r = scaling_rule{};
  r.kind_ = rule_kind::categorical;
  r.categories_ = {{"unhewn_cobblestone", 0.2}, {"cobblestone", 0.2},
                   {"sett", 0.4},               {"metal", 0.4},
                   {"wood", 0.4},               {"paved", 0.5},
                   {"concrete:lanes", 0.6},     {"concrete:plates", 0.6},
                   {"paving_stones", 0.6},      {"asphalt", 1.0},
                   {"concrete", 1.0}};
  r.default_ = 0.0;
  return r;
}

}  // namespace bike::scaling
