#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace asag::io {

/// Reads a whole file; throws asag::Error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace asag::io
