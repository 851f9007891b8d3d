#include "bike/perception/ttest.h"

#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::perception {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_cf(double const a, double const b, double const x) {
  constexpr auto kTiny = 1e-300;
  constexpr auto kEps = 1e-16;
  auto const qab = a + b;
  auto const qap = a + 1.0;
  auto const qam = a - 1.0;
  auto c = 1.0;
  auto d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) {
    d = kTiny;
  }
  d = 1.0 / d;
  auto h = d;
  for (auto m = 1; m <= 10000; ++m) {
    auto const m2 = 2.0 * m;
    auto aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    d = std::abs(d) < kTiny ? kTiny : d;
    c = 1.0 + aa / c;
    c = std::abs(c) < kTiny ? kTiny : c;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    d = std::abs(d) < kTiny ? kTiny : d;
    c = 1.0 + aa / c;
    c = std::abs(c) < kTiny ? kTiny : c;
    d = 1.0 / d;
    auto const del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      return h;
    }
  }
  fail(error_kind::numerical_error, "incomplete beta did not converge");
}

}  // namespace

double incomplete_beta(double const a, double const b, double const x) {
  if (!(a > 0.0 && b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    fail(error_kind::invalid_argument,
         fmt::format("incomplete beta outside its domain (a={}, b={}, x={})",
                     a, b, x));
  }
  if (x == 0.0 || x == 1.0) {
    return x;
  }
  auto const log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
  auto const front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double const t, double const df) {
  if (!(df > 0.0)) {
    fail(error_kind::invalid_argument, "degrees of freedom must be positive");
  }
  if (std::isinf(t)) {
    return 0.0;
  }
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

ttest_result welch_t(std::span<double const> a, std::span<double const> b) {
  auto r = ttest_result{};
  r.n_a_ = a.size();
  r.n_b_ = b.size();
  auto const moments = [](std::span<double const> v) {
    auto m = 0.0;
    for (auto const x : v) {
      m += x;
    }
    m /= static_cast<double>(v.size());
    auto ss = 0.0;
    for (auto const x : v) {
      ss += (x - m) * (x - m);
    }
    return std::pair{m, v.size() > 1 ? ss / static_cast<double>(v.size() - 1)
                                     : 0.0};
  };
  if (!a.empty()) {
    r.mean_a_ = moments(a).first;
  }
  if (!b.empty()) {
    r.mean_b_ = moments(b).first;
  }
  if (a.size() < 2 || b.size() < 2) {
    return r;
  }
  auto const [ma, va] = moments(a);
  auto const [mb, vb] = moments(b);
  auto const qa = va / static_cast<double>(a.size());
  auto const qb = vb / static_cast<double>(b.size());
  auto const se2 = qa + qb;
  if (!(se2 > 0.0) || !std::isfinite(se2)) {
    return r;
  }
  r.computable_ = true;
  r.t_ = (ma - mb) / std::sqrt(se2);
  r.df_ = se2 * se2 /
          (qa * qa / static_cast<double>(a.size() - 1) +
           qb * qb / static_cast<double>(b.size() - 1));
  r.p_ = student_t_two_sided(r.t_, r.df_);
  return r;
}

std::vector<ttest_result> feature_score_analysis(feature_matrix const& x,
                                                 score_table const& scores,
                                                 double const alpha) {
  auto out = std::vector<ttest_result>{};
  for (auto f = std::size_t{0}; f != x.cols(); ++f) {
    for (auto const d : ingest::kDimensions) {
      auto feature = std::vector<double>{};
      auto score = std::vector<double>{};
      for (auto r = std::size_t{0}; r != x.rows(); ++r) {
        if (auto const s = scores.mean(x.ids_[r], d); s.has_value()) {
          feature.push_back(x.at(r, f));
          score.push_back(*s);
        }
      }
      auto above = std::vector<double>{};
      auto below = std::vector<double>{};
      if (!feature.empty()) {
        auto mean = 0.0;
        for (auto const v : feature) {
          mean += v;
        }
        mean /= static_cast<double>(feature.size());
        for (auto i = std::size_t{0}; i != feature.size(); ++i) {
          (feature[i] >= mean ? above : below).push_back(score[i]);
        }
      }
      auto r = welch_t(above, below);
      r.feature_ = kFeatureNames[f];
      r.dimension_ = ingest::to_string(d);
      r.significant_ = r.computable_ && r.p_ < alpha;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace bike::perception
