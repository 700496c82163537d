#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fastcharge {

std::string_view trim(std::string_view s);
/// Drops a trailing `#` comment and surrounding whitespace.
std::string_view strip_comment(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

// `where` is prefixed to error messages (file:line 'key').
double parse_double(std::string_view s, const std::string& where);
long long parse_int(std::string_view s, const std::string& where);
bool parse_bool(std::string_view s, const std::string& where);

/// printf-style formatting into a std::string.
std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

/// Shortest decimal text that parses back to exactly x.
std::string round_trip(double x);

}  // namespace fastcharge
