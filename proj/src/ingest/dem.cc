#include "bike/ingest/dem.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <map>
#include <sstream>
#include <string>

#include <fmt/core.h>

#include "bike/error.h"
#include "bike/ingest/csv.h"

namespace bike::ingest {

geo::geo_point dem_grid::cell_center(int const col, int const row) const {
  return {origin_.lon_ + col * cell_size_,
          origin_.lat_ + (nrows_ - 1 - row) * cell_size_};
}

dem_grid parse_dem_ascii_grid(std::string_view const text) {
  auto in = std::istringstream{std::string{text}};
  auto header = std::map<std::string, double>{};

  // Header lines are "<key> <number>"; the first token that parses as a
  // number starts the value block.
  auto token = std::string{};
  auto first_value = std::optional<double>{};
  while (in >> token) {
    if (auto const v = parse_double(token); v.has_value()) {
      first_value = v;
      break;
    }
    auto key = token;
    std::transform(begin(key), end(key), begin(key),
                   [](unsigned char c) { return std::tolower(c); });
    auto value_token = std::string{};
    if (!(in >> value_token)) {
      fail(error_kind::parse_error,
           fmt::format("ASCII grid: header key '{}' has no value", token));
    }
    auto const v = parse_double(value_token);
    if (!v.has_value()) {
      fail(error_kind::parse_error,
           fmt::format("ASCII grid: header '{}' value '{}' is not a number",
                       token, value_token));
    }
    header[key] = *v;
  }

  auto const require = [&](char const* key) {
    auto const it = header.find(key);
    if (it == end(header)) {
      fail(error_kind::parse_error,
           fmt::format("ASCII grid: missing header key '{}'", key));
    }
    return it->second;
  };

  auto g = dem_grid{};
  auto const ncols = require("ncols");
  auto const nrows = require("nrows");
  if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) ||
      nrows != std::floor(nrows)) {
    fail(error_kind::parse_error, "ASCII grid: ncols/nrows must be positive integers");
  }
  g.ncols_ = static_cast<int>(ncols);
  g.nrows_ = static_cast<int>(nrows);
  g.cell_size_ = require("cellsize");
  if (!(g.cell_size_ > 0.0)) {
    fail(error_kind::parse_error, "ASCII grid: cellsize must be positive");
  }
  if (header.contains("xllcenter") && header.contains("yllcenter")) {
    g.origin_ = {header["xllcenter"], header["yllcenter"]};
  } else {
    g.origin_ = {require("xllcorner") + g.cell_size_ / 2.0,
                 require("yllcorner") + g.cell_size_ / 2.0};
  }
  if (auto const it = header.find("nodata_value"); it != end(header)) {
    g.nodata_ = it->second;
  }

  auto const expected = static_cast<std::size_t>(g.ncols_) * g.nrows_;
  g.values_.reserve(expected);
  if (first_value.has_value()) {
    g.values_.push_back(*first_value);
  }
  while (in >> token) {
    auto const v = parse_double(token);
    if (!v.has_value()) {
      fail(error_kind::parse_error,
           fmt::format("ASCII grid: value '{}' is not a number", token));
    }
    g.values_.push_back(*v);
  }
  if (g.values_.size() != expected) {
    fail(error_kind::parse_error,
         fmt::format("ASCII grid: header declares {}x{}={} values, found {}",
                     g.ncols_, g.nrows_, expected, g.values_.size()));
  }
  return g;
}

dem_grid load_dem_ascii_grid(std::filesystem::path const& path) {
  return parse_dem_ascii_grid(read_file(path));
}

}  // namespace bike::ingest
