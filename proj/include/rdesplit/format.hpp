#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rdesplit {

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// Parses a full token as a double; throws InvalidArgument on trailing junk.
double parse_double(std::string_view token);
long long parse_integer(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace rdesplit
