#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pneu {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// Strict decimal parse of the whole token; nullopt on junk or non-finite.
std::optional<double> parse_number(std::string_view text);

/// Writes `contents` to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view contents);

std::string read_file(const std::string& path);

}  // namespace pneu
