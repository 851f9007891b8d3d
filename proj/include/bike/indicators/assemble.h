#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bike/geo/geo_point.h"
#include "bike/indicators/registry.h"
#include "bike/scaling/scaling.h"
#include "bike/warnings.h"

namespace bike::indicators {

// Phase-1 output for one sample point: raw values aligned with the registry.
struct raw_row {
  std::string point_id_;
  std::string city_;
  geo::geo_point location_;
  std::optional<std::string> image_id_;
  std::vector<std::optional<double>> values_;
};

struct indicator_vector {
  std::string point_id_;
  std::string city_;
  geo::geo_point location_;
  std::vector<std::optional<double>> values_;  // scaled to [0,1]
};

// Extrema of every min-max indicator, pooled over all rows or per city.
class scaling_context {
public:
  scaling_context(registry const& reg, std::span<raw_row const> rows,
                  scaling::scope scope);

  scaling::scope scope() const { return scope_; }
  std::optional<scaling::extrema> extrema_of(std::size_t indicator,
                                             std::string_view city) const;

private:
  scaling::scope scope_;
  std::vector<std::optional<scaling::extrema>> pooled_;
  std::map<std::string, std::vector<std::optional<scaling::extrema>>,
           std::less<>>
      per_city_;
};

// Scales one row. Missing raw values stay missing. A row whose length differs
// from the registry is a configuration-error.
indicator_vector assemble_vector(raw_row const& row, registry const& reg,
                                 scaling_context const& ctx);

double missing_share(raw_row const& row);

struct assembly {
  std::vector<indicator_vector> vectors_;  // complete after imputation
  std::vector<std::string> dropped_;
  std::vector<double> fill_;             // imputation value per indicator
  std::vector<std::size_t> imputed_;     // filled entries per indicator
};

// Drops rows missing more than `max_missing` of their indicators, scales the
// rest, then fills gaps with the pooled mean of the scaled indicator (0.5 when
// the indicator is missing everywhere).
assembly assemble_all(registry const& reg, std::span<raw_row const> rows,
                      scaling::scope scope, double max_missing = 0.5,
                      warnings* w = nullptr);

}  // namespace bike::indicators
