#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bike/index/composite.h"
#include "bike/warnings.h"

namespace bike::index {

// Sample Pearson correlation. Unequal lengths or fewer than two values ->
// invalid-argument; zero variance -> nullopt.
std::optional<double> pearson_r(std::span<double const> x,
                                std::span<double const> y);

// m4 / m2^2 - 3 with population moments. Fewer than four values ->
// invalid-argument; zero variance -> nullopt.
std::optional<double> excess_kurtosis(std::span<double const> x);

double mean(std::span<double const> x);

// Sample standard deviation (n - 1); 0 for a single value.
double sample_sd(std::span<double const> x);

struct pair_stats {
  variant a_{variant::all};
  variant b_{variant::all};
  std::optional<double> r_;
  std::optional<double> r2_;
};

struct variant_stats {
  variant variant_{variant::all};
  std::size_t n_{0};
  double mean_{0.0};
  double sd_{0.0};
  std::optional<double> excess_kurtosis_;
};

struct comparison_report {
  std::vector<pair_stats> pairs_;
  std::vector<variant_stats> summaries_;
};

// Totals are aligned by point id over the points every variant shares.
// No shared point -> alignment-error; a partial overlap warns.
comparison_report compare_variants(
    std::map<variant, std::vector<composite_score>> const& scores,
    warnings* w = nullptr);

}  // namespace bike::index
