#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bike {

enum class error_kind {
  invalid_argument,
  invalid_geometry,
  parse_error,
  integrity_error,
  validation_error,
  configuration_error,
  numerical_error,
  fetch_error,
  size_error,
  io_error,
  alignment_error,
};

std::string_view to_string(error_kind);

// Single exception type for the library; `kind()` drives CLI exit codes.
class error : public std::runtime_error {
public:
  error(error_kind kind, std::string const& msg);

  error_kind kind() const noexcept { return kind_; }

private:
  error_kind kind_;
};

[[noreturn]] void fail(error_kind kind, std::string const& msg);

}  // namespace bike
