#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bike/indicators/assemble.h"
#include "bike/indicators/registry.h"

namespace bike::index {

enum class variant { all, svi_only, non_svi_only };

constexpr auto kVariants =
    std::array{variant::all, variant::svi_only, variant::non_svi_only};

std::string_view to_string(variant);
variant parse_variant(std::string_view);

bool is_active(indicators::indicator_spec const&, variant);

constexpr auto kCategoryCount = indicators::kCategories.size();

struct composite_score {
  std::string point_id_;
  std::string city_;
  variant variant_{variant::all};
  // Categories emptied by the variant filter stay unset.
  std::array<std::optional<double>, kCategoryCount> category_;
  double total_{0.0};
};

// Equal weights: indicator i contributes x_i * 100 / (N_c * N_ci) where N_c
// counts categories with an active indicator and N_ci the active indicators of
// i's category. No active indicator -> configuration-error; a missing active
// value -> invalid-argument.
composite_score compose(indicators::indicator_vector const& v,
                        indicators::registry const& reg, variant var);

std::vector<composite_score> compose_all(
    std::span<indicators::indicator_vector const> vectors,
    indicators::registry const& reg, variant var);

}  // namespace bike::index
