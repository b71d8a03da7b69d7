#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace sitr {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(const std::string& text);
std::string sha256_file(const std::filesystem::path& path);

// Digest over a directory tree: relative paths sorted lexicographically,
// each contributing "path\n<file digest>\n". Stable across filesystems.
std::string sha256_dir(const std::filesystem::path& dir);

}  // namespace sitr
