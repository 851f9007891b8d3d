#include <algorithm>
#include <numeric>

#include "support.h"

#include "bike/indicators/registry.h"
#include "bike/scaling/scaling.h"

using namespace bike;
using namespace bike::scaling;

TEST_SUITE("scaling") {

TEST_CASE("min_max and neg_min_max") {
  CHECK(min_max(std::vector{2.0, 4.0, 6.0}) == std::vector{0.0, 0.5, 1.0});
  CHECK(neg_min_max(std::vector{2.0, 4.0, 6.0}) == std::vector{1.0, 0.5, 0.0});
  CHECK(min_max(std::vector{5.0, 5.0, 5.0}) == std::vector{0.5, 0.5, 0.5});
  CHECK(neg_min_max(std::vector{5.0, 5.0}) == std::vector{0.5, 0.5});
  CHECK(test::kind_thrown([] { min_max(std::vector<double>{}); }) ==
        error_kind::invalid_argument);
  CHECK(test::kind_thrown([] {
          min_max(std::vector{1.0, std::numeric_limits<double>::infinity()});
        }) == error_kind::invalid_argument);
}

TEST_CASE("min_max preserves rank order and hits both endpoints") {
  auto rng = rng_t{11};
  auto v = std::vector<double>(1000);
  for (auto& x : v) {
    x = 1e3 * (uniform01(rng) - 0.3);
  }
  auto const s = min_max(v);
  auto const n = neg_min_max(v);
  CHECK(*std::min_element(s.begin(), s.end()) == 0.0);
  CHECK(*std::max_element(s.begin(), s.end()) == 1.0);
  auto order_v = std::vector<std::size_t>(v.size());
  std::iota(order_v.begin(), order_v.end(), 0U);
  auto order_s = order_v;
  std::stable_sort(order_v.begin(), order_v.end(),
                   [&](auto a, auto b) { return v[a] < v[b]; });
  std::stable_sort(order_s.begin(), order_s.end(),
                   [&](auto a, auto b) { return s[a] < s[b]; });
  CHECK(order_v == order_s);
  for (auto i = std::size_t{0}; i != v.size(); ++i) {
    CHECK(s[i] + n[i] == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("categorical tables") {
  auto const road = road_type_rule();
  CHECK(categorical_score("cycleway", road) == 1.0);
  CHECK(categorical_score("primary", road) == 0.2);
  CHECK(categorical_score("primary_link", road) == 0.2);
  CHECK(categorical_score("driveway", road) == 0.0);
  auto const pave = pavement_rule();
  CHECK(categorical_score("asphalt", pave) == 1.0);
  CHECK(categorical_score("cobblestone", pave) == 0.2);
  CHECK(categorical_score("unhewn_cobblestone", pave) == 0.2);
  CHECK(categorical_score("gravel", pave) == 0.0);
}

TEST_CASE("width and presence") {
  CHECK(width_score(5) == 0.5);
  CHECK(width_score(12) == 1.0);
  CHECK(width_score(0) == 0.0);
  CHECK(test::kind_thrown([] { width_score(-1); }) ==
        error_kind::validation_error);
  CHECK(presence_score(true, true) == 0.0);
  CHECK(presence_score(true, false) == 1.0);
  CHECK(presence_score(false, true) == 1.0);
  CHECK(presence_score(false, false) == 0.0);
}

TEST_CASE("apply uses the given extrema") {
  auto r = scaling_rule{};
  r.kind_ = rule_kind::neg_min_max;
  CHECK(apply(r, 3.0, extrema{1.0, 5.0}) == 0.5);
  CHECK(apply(r, 1.0, extrema{1.0, 5.0}) == 1.0);
  CHECK(test::kind_thrown([&] { apply(r, 1.0, std::nullopt); }) ==
        error_kind::configuration_error);
  auto const e = find_extrema(std::vector<std::optional<double>>{
      std::nullopt, 4.0, -1.0, std::nullopt});
  REQUIRE(e.has_value());
  CHECK(e->min_ == -1.0);
  CHECK(e->max_ == 4.0);
  CHECK_FALSE(find_extrema(std::vector<std::optional<double>>{}).has_value());
}

TEST_CASE("rule json round trip and validation") {
  auto const road = road_type_rule();
  auto const back = from_json(to_json(road));
  CHECK(back.kind_ == rule_kind::categorical);
  CHECK(back.categories_ == road.categories_);
  CHECK(test::kind_thrown([] {
          from_json({{"kind", "categorical"}, {"map", {{"x", 1.5}}}});
        }) == error_kind::configuration_error);
  CHECK(test::kind_thrown([] { from_json({{"kind", "log"}}); }) ==
        error_kind::configuration_error);
  CHECK(parse_scope("per_city") == scope::per_city);
  CHECK(test::kind_thrown([] { parse_scope("global"); }) ==
        error_kind::configuration_error);
}

TEST_CASE("default registry shape") {
  using indicators::category;
  auto const reg = indicators::default_registry();
  CHECK(reg.size() == 34U);
  auto per = std::map<category, int>{};
  auto svi = 0;
  for (auto const& s : reg.specs_) {
    ++per[s.category_];
    svi += s.source_ == indicators::source::svi ? 1 : 0;
  }
  CHECK(per[category::connectivity] == 3);
  CHECK(per[category::environment] == 7);
  CHECK(per[category::infrastructure] == 13);
  CHECK(per[category::perception] == 7);
  CHECK(per[category::vci] == 4);
  CHECK(svi == 21);
  CHECK_NOTHROW(indicators::validate(reg));

  auto const back = indicators::registry_from_json(indicators::to_json(reg));
  REQUIRE(back.size() == reg.size());
  for (auto i = std::size_t{0}; i != reg.size(); ++i) {
    CHECK(back.specs_[i].name_ == reg.specs_[i].name_);
    CHECK(back.specs_[i].radius_ == reg.specs_[i].radius_);
    CHECK(back.specs_[i].scaling_.kind_ == reg.specs_[i].scaling_.kind_);
  }
}

TEST_CASE("registry validation") {
  auto reg = indicators::default_registry();
  reg.specs_[1].name_ = reg.specs_[0].name_;
  CHECK(test::kind_thrown([&] { indicators::validate(reg); }) ==
        error_kind::configuration_error);

  reg = indicators::default_registry();
  reg.specs_[0].radius_ = 0.0;
  CHECK(test::kind_thrown([&] { indicators::validate(reg); }) ==
        error_kind::configuration_error);

  reg = indicators::default_registry();
  reg.specs_[*reg.find("potholes")].scaling_.kind_ = rule_kind::min_max;
  CHECK(test::kind_thrown([&] { indicators::validate(reg); }) ==
        error_kind::configuration_error);

  CHECK(test::kind_thrown([] {
          indicators::registry_from_json(
              {{"indicators",
                {{{"name", "x"},
                  {"category", "fun"},
                  {"source", "svi"},
                  {"extraction", "slope"},
                  {"scaling", {{"kind", "min_max"}}}}}}});
        }) == error_kind::configuration_error);
}

}  // TEST_SUITE
