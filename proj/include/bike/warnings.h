#pragma once

#include <string>
#include <vector>

namespace bike {

// Collects non-fatal diagnostics (dropped rows, duplicate survey answers).
// With `echo` set, each message is also written to stderr.
struct warnings {
  void add(std::string msg);

  std::vector<std::string> messages_;
  bool echo_{false};
};

// Forwards to `w` if given, otherwise prints to stderr.
void warn(warnings* w, std::string msg);

}  // namespace bike
