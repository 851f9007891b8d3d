#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bike/perception/regression.h"
#include "bike/perception/survey_stats.h"

namespace bike::perception {

// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with df degrees of freedom (df may be real).
double student_t_two_sided(double t, double df);

struct ttest_result {
  std::string feature_;
  std::string dimension_;
  bool computable_{false};
  double t_{0.0};
  double df_{0.0};
  double p_{1.0};
  double mean_a_{0.0};
  double mean_b_{0.0};
  std::size_t n_a_{0};
  std::size_t n_b_{0};
  bool significant_{false};
};

// Welch's unequal-variance test of A against B. Groups under two values or a
// zero standard error give computable_ = false.
ttest_result welch_t(std::span<double const> a, std::span<double const> b);

// For each feature column and dimension, splits the scored images at the
// feature mean (A = at or above, B = below) and tests their scores.
std::vector<ttest_result> feature_score_analysis(feature_matrix const& x,
                                                 score_table const& scores,
                                                 double alpha = 0.05);

}  // namespace bike::perception
