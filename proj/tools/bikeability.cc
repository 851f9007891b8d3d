#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <fmt/core.h>

#include "bike/error.h"
#include "bike/ingest/fetch.h"
#include "bike/pipeline/config.h"
#include "bike/pipeline/pipeline.h"
#include "bike/warnings.h"

namespace {

using bike::error_kind;
using nlohmann::json;

constexpr auto kExitConfig = 2;
constexpr auto kExitData = 3;
constexpr auto kExitCompute = 4;

int exit_code(error_kind const k) {
  switch (k) {
    case error_kind::configuration_error:
    case error_kind::invalid_argument: return kExitConfig;
    case error_kind::parse_error:
    case error_kind::validation_error:
    case error_kind::integrity_error:
    case error_kind::invalid_geometry: return kExitData;
    default: return kExitCompute;
  }
}

// "a.b=3" or "/a/b=3"; the value is JSON when it parses, a string otherwise.
std::pair<std::string, json> parse_override(std::string const& s) {
  auto const eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    bike::fail(error_kind::configuration_error,
               fmt::format("override '{}' is not key=value", s));
  }
  auto key = s.substr(0, eq);
  if (key.front() != '/') {
    for (auto& c : key) {
      c = c == '.' ? '/' : c;
    }
    key.insert(key.begin(), '/');
  }
  auto value = json::parse(s.substr(eq + 1), nullptr, false);
  if (value.is_discarded()) {
    value = s.substr(eq + 1);
  }
  return {key, value};
}

struct pipeline_args {
  std::string config_;
  std::vector<std::string> set_;
  std::string output_dir_;
  std::optional<std::uint64_t> seed_;
  std::optional<std::size_t> threads_;
  std::string scope_;
};

void add_pipeline_options(CLI::App* cmd, pipeline_args& a) {
  cmd->add_option("-c,--config", a.config_, "run config JSON")->required();
  cmd->add_option("--set", a.set_, "override a config key (key=value)");
  cmd->add_option("-o,--output-dir", a.output_dir_, "output directory");
  cmd->add_option("--seed", a.seed_, "sampling seed");
  cmd->add_option("--threads", a.threads_, "worker threads (0 = all cores)");
  cmd->add_option("--scope", a.scope_, "scaling scope: pooled or per_city");
}

int run_stages(pipeline_args const& a, bike::pipeline::stage const last) {
  auto overrides = std::vector<std::pair<std::string, json>>{};
  for (auto const& s : a.set_) {
    overrides.push_back(parse_override(s));
  }
  if (a.seed_.has_value()) {
    overrides.emplace_back("/seed", *a.seed_);
  }
  if (a.threads_.has_value()) {
    overrides.emplace_back("/threads", *a.threads_);
  }
  if (!a.scope_.empty()) {
    overrides.emplace_back("/scaling_scope", a.scope_);
  }
  auto cfg = bike::pipeline::load_config(a.config_, overrides);
  if (!a.output_dir_.empty()) {
    cfg.output_dir_ = a.output_dir_;
  } else if (auto const* env = std::getenv("BIKEABILITY_OUTPUT_DIR");
             env != nullptr && *env != '\0') {
    cfg.output_dir_ = env;
  }

  auto w = bike::warnings{};
  w.echo_ = true;
  auto const report = bike::pipeline::run_pipeline(cfg, last, &w);
  for (auto const& s : report.stages_) {
    fmt::print("{:<11} {:<9} {}\n", bike::pipeline::to_string(s.stage_),
               s.status_ == bike::pipeline::stage_status::cached ? "cached"
                                                                 : "computed",
               s.digest_.substr(0, 16));
  }
  fmt::print("outputs in {}\n", cfg.output_dir_.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  auto app = CLI::App{"Composite bikeability index engine"};
  app.require_subcommand(1);

  auto fetch_bbox = std::vector<double>{};
  auto fetch_endpoint = std::string{"https://overpass-api.de/api/interpreter"};
  auto fetch_out = std::string{};
  auto fetch_attempts = 3;
  auto* fetch = app.add_subcommand("fetch", "download a street network");
  fetch->add_option("--bbox", fetch_bbox, "min_lon min_lat max_lon max_lat")
      ->expected(4)
      ->required();
  fetch->add_option("--endpoint", fetch_endpoint, "Overpass-compatible URL");
  fetch->add_option("--out", fetch_out, "output GeoJSON")->required();
  fetch->add_option("--attempts", fetch_attempts, "attempts before failing");

  auto args = pipeline_args{};
  auto subcommands = std::vector<std::pair<CLI::App*, bike::pipeline::stage>>{};
  auto const add = [&](char const* name, char const* help,
                       bike::pipeline::stage const last) {
    auto* cmd = app.add_subcommand(name, help);
    add_pipeline_options(cmd, args);
    subcommands.emplace_back(cmd, last);
  };
  using bike::pipeline::stage;
  add("sample", "ingest and sample points", stage::sample);
  add("extract", "extract raw indicators", stage::extract);
  add("perception", "aggregate surveys and train perception models",
      stage::perception);
  add("compose", "scale and compose the index variants", stage::compose);
  add("compare", "compare index variants", stage::compare);
  add("export", "write GeoJSON and CSV reports", stage::export_results);
  add("run", "run every stage", stage::export_results);

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (fetch->parsed()) {
      auto opt = bike::ingest::fetch_options{};
      opt.attempts_ = fetch_attempts;
      bike::ingest::fetch_street_network(
          {fetch_bbox[0], fetch_bbox[1], fetch_bbox[2], fetch_bbox[3]},
          fetch_endpoint, fetch_out, opt);
      fmt::print("wrote {}\n", fetch_out);
      return 0;
    }
    for (auto const& [cmd, last] : subcommands) {
      if (cmd->parsed()) {
        return run_stages(args, last);
      }
    }
  } catch (bike::error const& e) {
    fmt::print(stderr, "error [{}]: {}\n", bike::to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (std::exception const& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitCompute;
  }
  return 0;
}
