// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pedrad::text {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Parses a complete token as a double; returns false on any trailing junk.
bool parse_double(std::string_view token, double& out);
bool parse_int(std::string_view token, long long& out);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delimiter);
std::vector<std::string_view> split_whitespace(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace pedrad::text
