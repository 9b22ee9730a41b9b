#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace learnact {

/// Hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);

/// Writes via a temp file in the same directory and renames into place,
/// so concurrent readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace learnact
