#pragma once

#include <string>
#include <string_view>

namespace nkpa {

/// Lower-case hex SHA-256 digest.
[[nodiscard]] std::string sha256_hex(std::string_view data);

/// Digest of a file's bytes. Throws IoError when it cannot be read.
[[nodiscard]] std::string sha256_file(const std::string& path);

}  // namespace nkpa
