#include "bike/index/composite.h"

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::index {

using indicators::source;

std::string_view to_string(variant const v) {
  switch (v) {
    case variant::all: return "all";
    case variant::svi_only: return "svi_only";
    case variant::non_svi_only: return "non_svi_only";
  }
  return "?";
}

variant parse_variant(std::string_view const s) {
  for (auto const v : kVariants) {
    if (to_string(v) == s) {
      return v;
    }
  }
  fail(error_kind::configuration_error,
       fmt::format("unknown index variant '{}'", s));
}

bool is_active(indicators::indicator_spec const& s, variant const v) {
  switch (v) {
    case variant::all: return true;
    case variant::svi_only: return s.source_ == source::svi;
    case variant::non_svi_only: return s.source_ == source::non_svi;
  }
  return false;
}

namespace {

struct weights {
  std::array<std::size_t, kCategoryCount> per_category_{};
  std::size_t categories_{0};
};

weights count_active(indicators::registry const& reg, variant const var) {
  auto w = weights{};
  for (auto const& s : reg.specs_) {
    if (is_active(s, var)) {
      ++w.per_category_[static_cast<std::size_t>(s.category_)];
    }
  }
  for (auto const n : w.per_category_) {
    w.categories_ += n != 0 ? 1U : 0U;
  }
  if (w.categories_ == 0) {
    fail(error_kind::configuration_error,
         fmt::format("variant '{}' leaves no active indicator", to_string(var)));
  }
  return w;
}

composite_score compose_with(indicators::indicator_vector const& v,
                             indicators::registry const& reg,
                             variant const var, weights const& w) {
  if (v.values_.size() != reg.size()) {
    fail(error_kind::configuration_error,
         fmt::format("point '{}' has {} values, registry has {}", v.point_id_,
                     v.values_.size(), reg.size()));
  }
  auto s = composite_score{v.point_id_, v.city_, var, {}, 0.0};
  for (auto c = std::size_t{0}; c != kCategoryCount; ++c) {
    if (w.per_category_[c] != 0) {
      s.category_[c] = 0.0;
    }
  }
  for (auto i = std::size_t{0}; i != reg.size(); ++i) {
    auto const& spec = reg.specs_[i];
    if (!is_active(spec, var)) {
      continue;
    }
    if (!v.values_[i].has_value()) {
      fail(error_kind::invalid_argument,
           fmt::format("point '{}': indicator '{}' is missing", v.point_id_,
                       spec.name_));
    }
    *s.category_[static_cast<std::size_t>(spec.category_)] += *v.values_[i];
  }
  for (auto c = std::size_t{0}; c != kCategoryCount; ++c) {
    if (s.category_[c].has_value()) {
      *s.category_[c] = *s.category_[c] * 100.0 /
                        static_cast<double>(w.categories_ * w.per_category_[c]);
      s.total_ += *s.category_[c];
    }
  }
  return s;
}

}  // namespace

composite_score compose(indicators::indicator_vector const& v,
                        indicators::registry const& reg, variant const var) {
  return compose_with(v, reg, var, count_active(reg, var));
}

std::vector<composite_score> compose_all(
    std::span<indicators::indicator_vector const> vectors,
    indicators::registry const& reg, variant const var) {
  auto const w = count_active(reg, var);
  auto out = std::vector<composite_score>{};
  out.reserve(vectors.size());
  for (auto const& v : vectors) {
    out.push_back(compose_with(v, reg, var, w));
  }
  return out;
}

}  // namespace bike::index
