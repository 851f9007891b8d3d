#include <cmath>

#include "support.h"

#include "bike/index/compare.h"
#include "bike/index/composite.h"

using namespace bike;
using namespace bike::index;
using indicators::category;
using indicators::indicator_vector;
using indicators::registry;

namespace {

indicator_vector random_vector(registry const& reg, rng_t& rng,
                               std::string id = "p") {
  auto v = indicator_vector{std::move(id), "c", {}, {}};
  for (auto i = std::size_t{0}; i != reg.size(); ++i) {
    v.values_.push_back(uniform01(rng));
  }
  return v;
}

// Brute force: every active indicator weighted by a count taken afresh from
// the registry.
double oracle_total(indicator_vector const& v, registry const& reg,
                    variant const var) {
  auto total = 0.0;
  for (auto i = std::size_t{0}; i != reg.size(); ++i) {
    if (!is_active(reg.specs_[i], var)) {
      continue;
    }
    auto in_category = 0.0;
    for (auto const& s : reg.specs_) {
      in_category += is_active(s, var) && s.category_ == reg.specs_[i].category_;
    }
    auto categories = 0.0;
    for (auto const c : indicators::kCategories) {
      auto any = false;
      for (auto const& s : reg.specs_) {
        any = any || (is_active(s, var) && s.category_ == c);
      }
      categories += any;
    }
    total += *v.values_[i] * 100.0 / (categories * in_category);
  }
  return total;
}

registry random_registry(rng_t& rng) {
  auto reg = indicators::default_registry();
  auto const n = 1 + uniform_below(rng, reg.size());
  auto out = registry{};
  for (auto i = std::size_t{0}; i != n; ++i) {
    auto s = reg.specs_[uniform_below(rng, reg.size())];
    s.name_ = "x" + std::to_string(i);
    s.category_ = indicators::kCategories[uniform_below(rng, 5)];
    s.source_ = uniform01(rng) < 0.5 ? indicators::source::svi
                                     : indicators::source::non_svi;
    out.specs_.push_back(s);
  }
  return out;
}

std::vector<composite_score> totals(std::vector<std::pair<std::string, double>> v,
                                    variant var) {
  auto out = std::vector<composite_score>{};
  for (auto const& [id, t] : v) {
    out.push_back(composite_score{id, "c", var, {}, t});
  }
  return out;
}

}  // namespace

TEST_SUITE("index") {

TEST_CASE("compose against the brute-force weighting") {
  auto const reg = indicators::default_registry();
  auto rng = rng_t{2024};
  for (auto trial = 0; trial != 300; ++trial) {
    auto const v = random_vector(reg, rng);
    for (auto const var : kVariants) {
      auto const s = compose(v, reg, var);
      CHECK(std::abs(s.total_ - oracle_total(v, reg, var)) < 1e-9);
      auto sum = 0.0;
      for (auto const& c : s.category_) {
        sum += c.value_or(0.0);
      }
      CHECK(std::abs(sum - s.total_) < 1e-9);
      CHECK(s.total_ >= 0.0);
      CHECK(s.total_ <= 100.0 + 1e-9);
    }
  }
}

TEST_CASE("compose on random registries") {
  auto rng = rng_t{99};
  for (auto trial = 0; trial != 300; ++trial) {
    auto const reg = random_registry(rng);
    auto const v = random_vector(reg, rng);
    for (auto const var : kVariants) {
      auto const active = std::count_if(
          reg.specs_.begin(), reg.specs_.end(),
          [&](auto const& s) { return is_active(s, var); });
      if (active == 0) {
        CHECK(test::kind_thrown([&] { compose(v, reg, var); }) ==
              error_kind::configuration_error);
        continue;
      }
      CHECK(std::abs(compose(v, reg, var).total_ - oracle_total(v, reg, var)) <
            1e-9);
    }
  }
}

TEST_CASE("extreme vectors") {
  auto const reg = indicators::default_registry();
  auto ones = indicator_vector{"p", "c", {}, {}};
  ones.values_.assign(reg.size(), 1.0);
  auto zeros = ones;
  zeros.values_.assign(reg.size(), 0.0);
  for (auto const var : kVariants) {
    auto const top = compose(ones, reg, var);
    CHECK(std::abs(top.total_ - 100.0) < 1e-9);
    auto active = 0;
    for (auto const& c : top.category_) {
      if (c.has_value()) {
        ++active;
      }
    }
    for (auto const& c : top.category_) {
      if (c.has_value()) {
        CHECK(std::abs(*c - 100.0 / active) < 1e-9);
      }
    }
    CHECK(compose(zeros, reg, var).total_ == 0.0);
  }
  auto const svi = compose(ones, reg, variant::svi_only);
  CHECK(std::count_if(svi.category_.begin(), svi.category_.end(),
                      [](auto const& c) { return c.has_value(); }) >= 1);
}

TEST_CASE("inactive values do not matter and active ones are monotone") {
  auto const reg = indicators::default_registry();
  auto rng = rng_t{5};
  auto v = random_vector(reg, rng);
  auto const base = compose(v, reg, variant::svi_only).total_;
  for (auto i = std::size_t{0}; i != reg.size(); ++i) {
    auto w = v;
    if (is_active(reg.specs_[i], variant::svi_only)) {
      w.values_[i] = std::min(1.0, *w.values_[i] + 0.1);
      CHECK(compose(w, reg, variant::svi_only).total_ > base);
    } else {
      w.values_[i] = std::nullopt;
      CHECK(compose(w, reg, variant::svi_only).total_ == base);
    }
  }
  auto missing = v;
  missing.values_[*reg.find("pavement")] = std::nullopt;
  CHECK(test::kind_thrown([&] { compose(missing, reg, variant::all); }) ==
        error_kind::invalid_argument);
  auto shorter = v;
  shorter.values_.pop_back();
  CHECK(test::kind_thrown([&] { compose(shorter, reg, variant::all); }) ==
        error_kind::configuration_error);
}

TEST_CASE("compose_all equals compose") {
  auto const reg = indicators::default_registry();
  auto rng = rng_t{8};
  auto vs = std::vector<indicator_vector>{};
  for (auto i = 0; i != 20; ++i) {
    vs.push_back(random_vector(reg, rng, "p" + std::to_string(i)));
  }
  auto const all = compose_all(vs, reg, variant::non_svi_only);
  REQUIRE(all.size() == vs.size());
  for (auto i = std::size_t{0}; i != vs.size(); ++i) {
    CHECK(all[i].point_id_ == vs[i].point_id_);
    CHECK(all[i].total_ == compose(vs[i], reg, variant::non_svi_only).total_);
  }
}

TEST_CASE("variant names") {
  for (auto const v : kVariants) {
    CHECK(parse_variant(to_string(v)) == v);
  }
  CHECK(test::kind_thrown([] { parse_variant("both"); }) ==
        error_kind::configuration_error);
}

TEST_CASE("descriptive statistics") {
  CHECK(std::abs(*pearson_r(std::vector<double>{1, 2, 3},
                            std::vector<double>{1, 2, 4}) -
                 0.9819805060619657) < 1e-12);
  CHECK(*pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{6, 4, 2}) ==
        doctest::Approx(-1.0).epsilon(1e-14));
  CHECK_FALSE(pearson_r(std::vector<double>{1, 1}, std::vector<double>{1, 2})
                  .has_value());
  CHECK(test::kind_thrown([] {
          pearson_r(std::vector<double>{1, 2}, std::vector<double>{1});
        }) == error_kind::invalid_argument);

  CHECK(*excess_kurtosis(std::vector<double>{-1, 1, -1, 1}) ==
        doctest::Approx(-2.0).epsilon(1e-14));
  // uniform on {1..5}: m2 = 2, m4 = 6.8
  CHECK(std::abs(*excess_kurtosis(std::vector<double>{1, 2, 3, 4, 5}) -
                 (6.8 / 4.0 - 3.0)) < 1e-12);
  CHECK_FALSE(excess_kurtosis(std::vector<double>{3, 3, 3, 3}).has_value());
  CHECK(test::kind_thrown([] { excess_kurtosis(std::vector<double>{1, 2, 3}); }) ==
        error_kind::invalid_argument);

  CHECK(mean(std::vector<double>{1, 2, 6}) == 3.0);
  CHECK(sample_sd(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) ==
        doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-14));
  CHECK(sample_sd(std::vector<double>{3}) == 0.0);
}

TEST_CASE("variant comparison alignment") {
  auto scores = std::map<variant, std::vector<composite_score>>{};
  scores[variant::all] = totals({{"a", 10}, {"b", 20}, {"c", 30}}, variant::all);
  scores[variant::svi_only] =
      totals({{"c", 33}, {"a", 11}, {"b", 21}}, variant::svi_only);
  scores[variant::non_svi_only] =
      totals({{"b", 5}, {"c", 15}, {"a", 0}}, variant::non_svi_only);

  auto const rep = compare_variants(scores);
  REQUIRE(rep.pairs_.size() == 3U);
  for (auto const& p : rep.pairs_) {
    REQUIRE(p.r_.has_value());
    CHECK(std::abs(*p.r2_ - *p.r_ * *p.r_) < 1e-15);
  }
  auto const& all_svi = rep.pairs_[0];
  CHECK(all_svi.a_ == variant::all);
  CHECK(all_svi.b_ == variant::svi_only);
  CHECK(*all_svi.r_ == doctest::Approx(*pearson_r(std::vector<double>{10, 20, 30},
                                                  std::vector<double>{11, 21, 33}))
                           .epsilon(1e-14));
  REQUIRE(rep.summaries_.size() == 3U);
  CHECK(rep.summaries_[0].n_ == 3U);
  CHECK(rep.summaries_[0].mean_ == 20.0);
  CHECK(rep.summaries_[0].sd_ == 10.0);
  CHECK_FALSE(rep.summaries_[0].excess_kurtosis_.has_value());

  auto partial = scores;
  partial[variant::svi_only].pop_back();
  auto w = warnings{};
  auto const rep2 = compare_variants(partial, &w);
  CHECK(rep2.summaries_[0].n_ == 2U);
  CHECK(w.messages_.size() == 1U);

  auto disjoint = scores;
  disjoint[variant::svi_only] = totals({{"z", 1}}, variant::svi_only);
  CHECK(test::kind_thrown([&] { compare_variants(disjoint); }) ==
        error_kind::alignment_error);

  auto dup = scores;
  dup[variant::all].push_back(dup[variant::all][0]);
  CHECK(test::kind_thrown([&] { compare_variants(dup); }) ==
        error_kind::alignment_error);
}

}  // TEST_SUITE
