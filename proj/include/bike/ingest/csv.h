#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bike::ingest {

struct csv_row {
  std::size_t line_{0};  // 1-based source line
  std::vector<std::string> fields_;
};

struct csv_table {
  // Index of `name` in the header; throws parse-error if absent.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  std::vector<std::string> header_;
  std::vector<csv_row> rows_;
};

// RFC 4180 reader: quoted fields, doubled quotes, CRLF, optional UTF-8 BOM.
// First line is the header. Blank lines are skipped.
csv_table parse_csv(std::string_view text);
csv_table read_csv(std::filesystem::path const& path);

// Quotes a field when it contains a separator, quote or newline.
std::string csv_escape(std::string_view field);

std::string read_file(std::filesystem::path const& path);

// Strict number parsing (whole field must be consumed, surrounding spaces
// allowed). Returns nullopt on failure.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

}  // namespace bike::ingest
