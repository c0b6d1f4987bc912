#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace asymgame {

// Shortest round-trip-stable rendering used for every floating CSV field:
// 12 significant digits, "%.12g" style, with -0 printed as 0.
std::string format_real(double x);

std::vector<std::string> split_fields(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

// Parses a full-string real; throws InvalidArgument naming `what` otherwise.
double parse_real(std::string_view s, std::string_view what);
long parse_int(std::string_view s, std::string_view what);

}  // namespace asymgame
