#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace arise::util {

std::string_view trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);
bool starts_with_ci(std::string_view s, std::string_view prefix);
std::string to_lower(std::string_view s);

/// Fixed-point rendering with round-half-up at `decimals` places.
std::string fixed(double value, int decimals);

/// Shortest decimal text that round-trips to `value`.
std::string shortest(double value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// Extracts the body of the first fenced code block; returns the trimmed input
/// when no fence is present.
std::string strip_code_fence(std::string_view text);

}  // namespace arise::util
