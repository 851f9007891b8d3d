#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace bike::scaling {

enum class rule_kind { min_max, neg_min_max, categorical, width_over_10, presence };
enum class scope { pooled, per_city };

std::string_view to_string(rule_kind);
std::string_view to_string(scope);

struct scaling_rule {
  rule_kind kind_{rule_kind::min_max};
  std::map<std::string, double, std::less<>> categories_;  // categorical only
  double default_{0.0};                                    // categorical only
  bool invert_{false};                                     // presence only
};

// Throws configuration-error if a categorical value or the default falls
// outside [0,1].
void validate(scaling_rule const&);

scaling_rule from_json(nlohmann::json const&);
nlohmann::json to_json(scaling_rule const&);
scope parse_scope(std::string_view);

struct extrema {
  double min_{0.0};
  double max_{0.0};
};

// Min/max over finite values; nullopt when there are none.
std::optional<extrema> find_extrema(std::span<double const> values);
std::optional<extrema> find_extrema(
    std::span<std::optional<double> const> values);

// Affine map of [min, max] onto [0,1]; degenerate range maps to 0.5.
double min_max_value(double x, extrema const& e);

// Whole-list scaling. Empty or non-finite input -> invalid-argument.
std::vector<double> min_max(std::span<double const> values);
std::vector<double> neg_min_max(std::span<double const> values);

double categorical_score(std::string_view value, scaling_rule const& rule);

// min(width / 10, 1); negative width -> validation-error.
double width_score(double width_m);

double presence_score(bool present, bool invert);

// Second-phase transform of one raw value. min_max/neg_min_max require the
// pooled extrema; categorical values are already scores and pass through
// (clamped to [0,1]).
double apply(scaling_rule const& rule, double raw,
             std::optional<extrema> const& e);

// Defaults taken from the indicator table.
scaling_rule road_type_rule();
scaling_rule pavement_rule();

}  // namespace bike::scaling
