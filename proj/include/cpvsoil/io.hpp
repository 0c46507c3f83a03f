#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace cpvsoil {

/// Locale-independent parse of the whole string; nullopt on any junk.
std::optional<double> parse_double(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`, creating parent
/// directories as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

}  // namespace cpvsoil
