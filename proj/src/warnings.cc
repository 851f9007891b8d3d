#include "bike/warnings.h"

#include <fmt/core.h>

namespace bike {

void warnings::add(std::string msg) {
  if (echo_) {
    fmt::print(stderr, "warning: {}\n", msg);
  }
  messages_.emplace_back(std::move(msg));
}

void warn(warnings* w, std::string msg) {
  if (w != nullptr) {
    w->add(std::move(msg));
  } else {
    fmt::print(stderr, "warning: {}\n", msg);
  }
}

}  // namespace bike
