#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bike/index/composite.h"
#include "bike/perception/regression.h"
#include "bike/scaling/scaling.h"

namespace bike::pipeline {

struct city_config {
  std::string name_;
  std::filesystem::path street_graph_;
  std::optional<std::filesystem::path> land_use_;
  std::optional<std::filesystem::path> dem_;
  std::optional<std::filesystem::path> aqi_;
  std::optional<std::filesystem::path> features_;
  std::size_t n_{0};
};

struct run_config {
  std::vector<city_config> cities_;
  std::optional<std::filesystem::path> survey_;
  std::optional<std::filesystem::path> registry_;

  std::uint64_t seed_{42};
  double buffer_radius_{500.0};
  double edge_radius_{100.0};
  double bind_distance_{50.0};
  double idw_power_{2.0};
  double idw_epsilon_{1.0};
  double mad_threshold_{3.0};
  double landuse_cell_{25.0};
  double presence_threshold_{0.0};
  double max_missing_{0.5};
  double alpha_{0.05};
  scaling::scope scope_{scaling::scope::pooled};
  std::vector<index::variant> variants_{index::kVariants.begin(),
                                        index::kVariants.end()};
  perception::regressor_options regressor_;
  std::size_t threads_{0};  // 0 = hardware concurrency
  std::filesystem::path output_dir_{"out"};
};

// Relative paths resolve against `base`. Unknown keys are rejected so typos
// surface as configuration errors.
run_config config_from_json(nlohmann::json const& j,
                            std::filesystem::path const& base = {});
nlohmann::json to_json(run_config const&);

// Reads the JSON file, applies `overrides` (JSON pointer -> value) and parses.
run_config load_config(std::filesystem::path const& path,
                       std::vector<std::pair<std::string, nlohmann::json>> const&
                           overrides = {});

// Ranges, positivity and path existence; configuration-error otherwise.
void validate(run_config const&);

}  // namespace bike::pipeline
