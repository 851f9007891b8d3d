#include "bike/pipeline/digest.h"

#include <array>

#include <fmt/core.h>
#include <openssl/evp.h>

#include "bike/error.h"
#include "bike/ingest/csv.h"

namespace bike::pipeline {

std::string sha256_hex(std::string_view const data) {
  auto md = std::array<unsigned char, EVP_MAX_MD_SIZE>{};
  auto len = 0U;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    fail(error_kind::io_error, "SHA-256 computation failed");
  }
  auto out = std::string{};
  out.reserve(2U * len);
  for (auto i = 0U; i != len; ++i) {
    out += fmt::format("{:02x}", md[i]);
  }
  return out;
}

std::string file_digest(std::filesystem::path const& path) {
  return sha256_hex(ingest::read_file(path));
}

digest_builder& digest_builder::add(std::string_view const part) {
  buf_ += fmt::format("{}:", part.size());
  buf_ += part;
  return *this;
}

std::string digest_builder::finish() const { return sha256_hex(buf_); }

}  // namespace bike::pipeline
