#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "bike/geo/geo_point.h"

namespace bike::ingest {

// Elevation raster in geographic coordinates. Rows are stored in file order,
// i.e. row 0 is the northernmost row.
struct dem_grid {
  double value(int const col, int const row) const {
    return values_[static_cast<std::size_t>(row) * ncols_ + col];
  }
  bool is_nodata(double const v) const { return v == nodata_; }

  // Center of cell (col, row).
  geo::geo_point cell_center(int col, int row) const;

  geo::geo_point origin_;  // center of the lower-left cell
  double cell_size_{0.0};  // degrees
  int ncols_{0};
  int nrows_{0};
  double nodata_{-9999.0};
  std::vector<double> values_;
};

// ESRI ASCII grid. Accepts xllcorner/yllcorner or xllcenter/yllcenter;
// NODATA_value is optional (defaults to -9999).
dem_grid parse_dem_ascii_grid(std::string_view text);
dem_grid load_dem_ascii_grid(std::filesystem::path const& path);

}  // namespace bike::ingest
