#include "asymgame/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "asymgame/errors.hpp"

namespace asymgame {

std::string format_real(double x) {
  if (x == 0.0) x = 0.0;  // drops the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InvalidArgument("expected a finite number for " + std::string(what) +
                          ", got '" + std::string(s) + "'");
  }
  return v;
}

long parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw InvalidArgument("expected an integer for " + std::string(what) +
                          ", got '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace asymgame
