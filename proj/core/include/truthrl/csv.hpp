#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace truthrl::csv {

// Shortest decimal that parses back to the same double.
std::string format_double(double value);
std::string format_hex64(std::uint64_t value);

double parse_double(std::string_view text, std::string_view field);
long long parse_int(std::string_view text, std::string_view field);
std::uint64_t parse_u64(std::string_view text, std::string_view field);
std::uint64_t parse_hex64(std::string_view text, std::string_view field);

// RFC 4180 quoting when the field holds a comma, quote or newline.
std::string quote(std::string_view field);

std::vector<std::string_view> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

// Splits on '\n', drops a trailing '\r' per line and a final empty line.
std::vector<std::string_view> lines(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace truthrl::csv
