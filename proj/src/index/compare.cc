#include "bike/index/compare.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::index {

double mean(std::span<double const> x) {
  if (x.empty()) {
    fail(error_kind::invalid_argument, "mean of an empty list");
  }
  auto s = 0.0;
  for (auto const v : x) {
    s += v;
  }
  return s / static_cast<double>(x.size());
}

double sample_sd(std::span<double const> x) {
  auto const m = mean(x);
  if (x.size() < 2) {
    return 0.0;
  }
  auto ss = 0.0;
  for (auto const v : x) {
    ss += (v - m) * (v - m);
  }
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

std::optional<double> pearson_r(std::span<double const> x,
                                std::span<double const> y) {
  if (x.size() != y.size() || x.size() < 2) {
    fail(error_kind::invalid_argument,
         fmt::format("pearson_r needs equal lengths >= 2, got {} and {}",
                     x.size(), y.size()));
  }
  auto const mx = mean(x);
  auto const my = mean(y);
  auto sxy = 0.0;
  auto sxx = 0.0;
  auto syy = 0.0;
  for (auto i = std::size_t{0}; i != x.size(); ++i) {
    auto const dx = x[i] - mx;
    auto const dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    return std::nullopt;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> excess_kurtosis(std::span<double const> x) {
  if (x.size() < 4) {
    fail(error_kind::invalid_argument,
         fmt::format("kurtosis needs at least 4 values, got {}", x.size()));
  }
  auto const m = mean(x);
  auto m2 = 0.0;
  auto m4 = 0.0;
  for (auto const v : x) {
    auto const d2 = (v - m) * (v - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  auto const n = static_cast<double>(x.size());
  m2 /= n;
  m4 /= n;
  if (m2 == 0.0) {
    return std::nullopt;
  }
  return m4 / (m2 * m2) - 3.0;
}

comparison_report compare_variants(
    std::map<variant, std::vector<composite_score>> const& scores,
    warnings* w) {
  auto report = comparison_report{};
  if (scores.empty()) {
    return report;
  }

  auto totals = std::map<variant, std::map<std::string, double>>{};
  for (auto const& [var, list] : scores) {
    auto& t = totals[var];
    for (auto const& s : list) {
      if (!t.emplace(s.point_id_, s.total_).second) {
        fail(error_kind::alignment_error,
             fmt::format("variant '{}' scores point '{}' twice",
                         to_string(var), s.point_id_));
      }
    }
  }

  auto shared = std::set<std::string>{};
  for (auto const& [id, v] : begin(totals)->second) {
    shared.insert(id);
  }
  auto partial = false;
  for (auto const& [var, t] : totals) {
    partial = partial || t.size() != shared.size();
    std::erase_if(shared, [&](std::string const& id) { return !t.contains(id); });
    partial = partial || t.size() != shared.size();
  }
  if (shared.empty()) {
    fail(error_kind::alignment_error, "index variants share no sample point");
  }
  if (partial) {
    warn(w, fmt::format("variant comparison restricted to {} shared point(s)",
                        shared.size()));
  }

  auto aligned = std::map<variant, std::vector<double>>{};
  for (auto const& [var, t] : totals) {
    auto& a = aligned[var];
    for (auto const& id : shared) {
      a.push_back(t.at(id));
    }
  }

  for (auto const& [var, a] : aligned) {
    auto s = variant_stats{var, a.size(), mean(a), sample_sd(a), std::nullopt};
    if (a.size() >= 4) {
      s.excess_kurtosis_ = excess_kurtosis(a);
    }
    report.summaries_.push_back(s);
  }
  for (auto i = begin(aligned); i != end(aligned); ++i) {
    for (auto j = std::next(i); j != end(aligned); ++j) {
      auto p = pair_stats{i->first, j->first, std::nullopt, std::nullopt};
      if (i->second.size() >= 2) {
        p.r_ = pearson_r(i->second, j->second);
        if (p.r_.has_value()) {
          p.r2_ = *p.r_ * *p.r_;
        }
      }
      report.pairs_.push_back(p);
    }
  }
  return report;
}

}  // namespace bike::index
