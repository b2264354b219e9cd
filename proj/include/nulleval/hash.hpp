#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace nulleval {

// SHA-256 of a byte string, rendered as lowercase hex.
std::string sha256_hex(std::string_view data);

// Content fingerprint of a dataset source. For a regular file this hashes
// the file bytes; for a directory it hashes every regular file in
// lexicographic path order (relative path and contents), so renames and
// edits both change the fingerprint.
std::string fingerprint_path(const std::filesystem::path& source);

}  // namespace nulleval
