#include "bike/error.h"

#include <fmt/core.h>

namespace bike {

std::string_view to_string(error_kind const k) {
  switch (k) {
    case error_kind::invalid_argument: return "invalid-argument";
    case error_kind::invalid_geometry: return "invalid-geometry";
    case error_kind::parse_error: return "parse-error";
    case error_kind::integrity_error: return "integrity-error";
    case error_kind::validation_error: return "validation-error";
    case error_kind::configuration_error: return "configuration-error";
    case error_kind::numerical_error: return "numerical-error";
    case error_kind::fetch_error: return "fetch-error";
    case error_kind::size_error: return "size-error";
    case error_kind::io_error: return "io-error";
    case error_kind::alignment_error: return "alignment-error";
  }
  return "unknown-error";
}

error::error(error_kind const kind, std::string const& msg)
    : std::runtime_error{fmt::format("{}: {}", to_string(kind), msg)},
      kind_{kind} {}

void fail(error_kind const kind, std::string const& msg) {
  throw error{kind, msg};
}

}  // namespace bike
