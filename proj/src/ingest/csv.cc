#include "bike/ingest/csv.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "bike/error.h"

namespace bike::ingest {

std::optional<std::size_t> csv_table::find_column(
    std::string_view const name) const {
  auto const it = std::find(begin(header_), end(header_), name);
  if (it == end(header_)) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(std::distance(begin(header_), it));
}

std::size_t csv_table::column(std::string_view const name) const {
  auto const idx = find_column(name);
  if (!idx.has_value()) {
    fail(error_kind::parse_error,
         fmt::format("missing required CSV column '{}'", name));
  }
  return *idx;
}

csv_table parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) {
    text.remove_prefix(3);
  }

  auto records = std::vector<csv_row>{};
  auto current = csv_row{};
  auto field = std::string{};
  auto in_quotes = false;
  auto field_started = false;
  auto line = std::size_t{1};
  current.line_ = 1;

  auto const end_record = [&]() {
    current.fields_.push_back(std::move(field));
    field.clear();
    auto const blank =
        current.fields_.size() == 1 && current.fields_.front().empty();
    if (!blank) {
      records.push_back(std::move(current));
    }
    current = csv_row{};
    current.line_ = line;
    field_started = false;
  };

  for (auto i = std::size_t{0}; i < text.size(); ++i) {
    auto const c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') {
          ++line;
        }
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          fail(error_kind::parse_error,
               fmt::format("line {}: stray quote inside unquoted field", line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        current.fields_.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') {
          break;
        }
        ++line;
        end_record();
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    fail(error_kind::parse_error,
         fmt::format("line {}: unterminated quoted field", current.line_));
  }
  if (field_started || !field.empty() || !current.fields_.empty()) {
    end_record();
  }

  auto table = csv_table{};
  if (records.empty()) {
    fail(error_kind::parse_error, "CSV has no header row");
  }
  table.header_ = std::move(records.front().fields_);
  for (auto& h : table.header_) {
    h.erase(0, h.find_first_not_of(' '));
    h.erase(h.find_last_not_of(' ') + 1);
  }
  for (auto i = std::size_t{1}; i < records.size(); ++i) {
    if (records[i].fields_.size() != table.header_.size()) {
      fail(error_kind::parse_error,
           fmt::format("line {}: expected {} fields, found {}",
                       records[i].line_, table.header_.size(),
                       records[i].fields_.size()));
    }
    table.rows_.push_back(std::move(records[i]));
  }
  return table;
}

csv_table read_csv(std::filesystem::path const& path) {
  return parse_csv(read_file(path));
}

std::string csv_escape(std::string_view const field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string{field};
  }
  auto out = std::string{"\""};
  for (auto const c : field) {
    if (c == '"') {
      out.push_back('"');
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string read_file(std::filesystem::path const& path) {
  auto in = std::ifstream{path, std::ios::binary};
  if (!in) {
    fail(error_kind::io_error, fmt::format("cannot open '{}'", path.string()));
  }
  auto ss = std::ostringstream{};
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.starts_with('+')) {
    s.remove_prefix(1);
  }
  auto value = 0.0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  if (s.starts_with('+')) {
    s.remove_prefix(1);
  }
  auto value = 0LL;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return value;
}

}  // namespace bike::ingest
