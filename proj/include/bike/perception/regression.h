#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bike/perception/features.h"
#include "bike/warnings.h"

namespace bike::perception {

// Non-owning row-major view.
struct matrix_view {
  double at(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  std::span<double const> row(std::size_t const r) const {
    return values_.subspan(r * cols_, cols_);
  }

  std::span<double const> values_;
  std::size_t rows_{0};
  std::size_t cols_{0};
};

inline matrix_view view(feature_matrix const& m) {
  return {m.values_, m.rows(), m.cols()};
}

enum class model_kind { ridge, gbt };

std::string_view to_string(model_kind);
model_kind parse_model_kind(std::string_view);

// Names follow the usual boosted-tree vocabulary. max_depth <= 0 means
// unlimited; subsample and colsample are row and feature fractions per tree.
struct gbt_params {
  friend bool operator==(gbt_params const&, gbt_params const&) = default;

  int num_leaves_{31};
  int max_depth_{-1};
  int min_child_samples_{20};
  double subsample_{1.0};
  double colsample_{1.0};
  double learning_rate_{0.1};
  int n_estimators_{100};
};

nlohmann::json to_json(gbt_params const&);
gbt_params gbt_params_from_json(nlohmann::json const&);

struct tree_node {
  int feature_{-1};  // -1 marks a leaf
  double threshold_{0.0};  // go left when x <= threshold
  int left_{-1};
  int right_{-1};
  double value_{0.0};
};

struct regression_tree {
  double predict(std::span<double const> x) const;

  std::vector<tree_node> nodes_;
};

struct regression_model {
  double predict(std::span<double const> x) const;

  model_kind kind_{model_kind::ridge};
  std::vector<std::string> features_;

  double intercept_{0.0};  // ridge
  std::vector<double> coef_;
  double lambda_{0.0};

  double base_{0.0};  // gbt
  gbt_params params_;
  std::vector<regression_tree> trees_;

  std::uint64_t seed_{0};
  double split_{0.0};
  std::size_t n_train_{0};
  std::size_t n_validation_{0};
};

nlohmann::json to_json(regression_model const&);
regression_model model_from_json(nlohmann::json const&);

struct metrics {
  double mae_{0.0};
  std::optional<double> mape_;  // absent when some y is 0
  double rmse_{0.0};
  double r2_{0.0};  // 0 when y has no variance
};

// Unequal or zero lengths -> invalid-argument.
metrics regression_metrics(std::span<double const> y,
                           std::span<double const> y_hat,
                           warnings* w = nullptr);

struct split {
  std::vector<std::size_t> train_;
  std::vector<std::size_t> validation_;
};

// Seeded shuffle of 0..n-1; the first round(n * fraction) indices (at least
// one, at most n-1) train. Both parts are returned in ascending order.
split train_validation_split(std::size_t n, double fraction,
                             std::uint64_t seed);

// Closed form on centred data; the intercept is not penalised.
// lambda = 0 on a rank-deficient design -> numerical-error.
regression_model fit_ridge(matrix_view x, std::span<double const> y,
                           double lambda);

// Squared-loss boosting with best-first (leaf-wise) tree growth.
regression_model fit_gbt(matrix_view x, std::span<double const> y,
                         gbt_params const& params, std::uint64_t seed);

// k-fold mean validation RMSE for each grid entry; returns the best entry
// (first on ties). Needs 2 <= folds <= rows and a non-empty grid.
gbt_params cross_validate_gbt(matrix_view x, std::span<double const> y,
                              std::span<gbt_params const> grid,
                              std::size_t folds, std::uint64_t seed);

struct regressor_options {
  model_kind kind_{model_kind::ridge};
  double lambda_{1e-3};
  double split_{0.8};
  std::uint64_t seed_{42};
  gbt_params gbt_;
  std::vector<gbt_params> grid_;  // tuned by CV on the training part if set
  std::size_t folds_{10};
};

struct training_result {
  regression_model model_;
  metrics metrics_;
  split split_;
};

// Needs at least 10 rows (invalid-argument otherwise).
training_result train_regressor(matrix_view x, std::span<double const> y,
                                regressor_options const& opt,
                                warnings* w = nullptr);

std::map<std::string, double> predict_scores(regression_model const& model,
                                             feature_matrix const& x);

}  // namespace bike::perception
