#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace bike::pipeline {

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string file_digest(std::filesystem::path const& path);

// Incremental digest over tagged parts; parts are length-prefixed so
// ("ab","c") and ("a","bc") differ.
class digest_builder {
public:
  digest_builder& add(std::string_view part);
  std::string finish() const;

private:
  std::string buf_;
};

}  // namespace bike::pipeline
