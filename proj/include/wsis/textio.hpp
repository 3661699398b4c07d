#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wsis::textio {

// Shortest round-trip decimal form of a double (std::to_chars).  Used for all
// CSV/JSON number output so files are bit-identical across runs and toolchains.
std::string format_double(double value);

// Hexadecimal float form, exact round-trip; used by network checkpoints.
std::string format_hex(double value);
double parse_hex(std::string_view text);

// Strict double parser; throws wsis::IngestionError on trailing garbage.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Splits into lines, accepting LF and CRLF, dropping a trailing empty line.
std::vector<std::string_view> lines(std::string_view text);

} // namespace wsis::textio
