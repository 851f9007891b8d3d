#include "bike/indicators/assemble.h"

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::indicators {

namespace {

bool needs_extrema(scaling::rule_kind const k) {
  return k == scaling::rule_kind::min_max ||
         k == scaling::rule_kind::neg_min_max;
}

void check_length(raw_row const& row, registry const& reg) {
  if (row.values_.size() != reg.size()) {
    fail(error_kind::configuration_error,
         fmt::format("point '{}' has {} raw values, registry has {}",
                     row.point_id_, row.values_.size(), reg.size()));
  }
}

std::vector<std::optional<scaling::extrema>> column_extrema(
    registry const& reg, std::span<raw_row const* const> rows) {
  auto out = std::vector<std::optional<scaling::extrema>>(reg.size());
  for (auto i = std::size_t{0}; i != reg.size(); ++i) {
    if (!needs_extrema(reg.specs_[i].scaling_.kind_)) {
      continue;
    }
    for (auto const* r : rows) {
      auto const& v = r->values_[i];
      if (!v.has_value()) {
        continue;
      }
      if (!out[i].has_value()) {
        out[i] = scaling::extrema{*v, *v};
      } else {
        out[i]->min_ = std::min(out[i]->min_, *v);
        out[i]->max_ = std::max(out[i]->max_, *v);
      }
    }
  }
  return out;
}

}  // namespace

scaling_context::scaling_context(registry const& reg,
                                 std::span<raw_row const> rows,
                                 scaling::scope const scope)
    : scope_{scope} {
  auto all = std::vector<raw_row const*>{};
  auto by_city = std::map<std::string, std::vector<raw_row const*>, std::less<>>{};
  for (auto const& r : rows) {
    check_length(r, reg);
    all.push_back(&r);
    by_city[r.city_].push_back(&r);
  }
  pooled_ = column_extrema(reg, all);
  if (scope_ == scaling::scope::per_city) {
    for (auto const& [city, members] : by_city) {
      per_city_.emplace(city, column_extrema(reg, members));
    }
  }
}

std::optional<scaling::extrema> scaling_context::extrema_of(
    std::size_t const indicator, std::string_view const city) const {
  if (scope_ == scaling::scope::pooled) {
    return pooled_.at(indicator);
  }
  auto const it = per_city_.find(city);
  return it == end(per_city_) ? std::nullopt : it->second.at(indicator);
}

indicator_vector assemble_vector(raw_row const& row, registry const& reg,
                                 scaling_context const& ctx) {
  check_length(row, reg);
  auto v = indicator_vector{row.point_id_, row.city_, row.location_, {}};
  v.values_.reserve(reg.size());
  for (auto i = std::size_t{0}; i != reg.size(); ++i) {
    auto const& raw = row.values_[i];
    if (!raw.has_value()) {
      v.values_.emplace_back(std::nullopt);
      continue;
    }
    auto const& rule = reg.specs_[i].scaling_;
    auto const e = needs_extrema(rule.kind_)
                       ? ctx.extrema_of(i, row.city_)
                       : std::optional<scaling::extrema>{};
    v.values_.emplace_back(scaling::apply(rule, *raw, e));
  }
  return v;
}

double missing_share(raw_row const& row) {
  if (row.values_.empty()) {
    return 0.0;
  }
  auto missing = std::size_t{0};
  for (auto const& v : row.values_) {
    missing += v.has_value() ? 0U : 1U;
  }
  return static_cast<double>(missing) / static_cast<double>(row.values_.size());
}

assembly assemble_all(registry const& reg, std::span<raw_row const> rows,
                      scaling::scope const scope, double const max_missing,
                      warnings* w) {
  auto out = assembly{};
  auto kept = std::vector<raw_row>{};
  for (auto const& r : rows) {
    check_length(r, reg);
    if (missing_share(r) > max_missing) {
      out.dropped_.push_back(r.point_id_);
    } else {
      kept.push_back(r);
    }
  }
  if (!out.dropped_.empty()) {
    warn(w, fmt::format("dropped {} point(s) missing more than {:g}% of "
                        "indicators",
                        out.dropped_.size(), max_missing * 100.0));
  }

  auto const ctx = scaling_context{reg, kept, scope};
  out.vectors_.reserve(kept.size());
  for (auto const& r : kept) {
    out.vectors_.push_back(assemble_vector(r, reg, ctx));
  }

  out.fill_.assign(reg.size(), 0.5);
  out.imputed_.assign(reg.size(), 0U);
  for (auto i = std::size_t{0}; i != reg.size(); ++i) {
    auto sum = 0.0;
    auto n = std::size_t{0};
    for (auto const& v : out.vectors_) {
      if (v.values_[i].has_value()) {
        sum += *v.values_[i];
        ++n;
      }
    }
    if (n != 0U) {
      out.fill_[i] = sum / static_cast<double>(n);
    } else if (!out.vectors_.empty()) {
      warn(w, fmt::format("indicator '{}' is missing at every point; using 0.5",
                          reg.specs_[i].name_));
    }
    for (auto& v : out.vectors_) {
      if (!v.values_[i].has_value()) {
        v.values_[i] = out.fill_[i];
        ++out.imputed_[i];
      }
    }
  }
  return out;
}

}  // namespace bike::indicators
