#pragma once

// Shared helpers for the line-oriented text formats.

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "qmoney/error.hpp"

namespace qmoney::detail {

inline std::string format17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] inline void parse_fail(std::string_view format, size_t line,
                                    const std::string& msg) {
  throw Error(ErrorKind::Parse,
              std::string(format) + ":" + std::to_string(line) + ": " + msg);
}

inline double parse_double(std::string_view tok, std::string_view format, size_t line) {
  // from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    parse_fail(format, line, "invalid number '" + std::string(tok) + "'");
  return v;
}

inline long long parse_int(std::string_view tok, std::string_view format, size_t line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    parse_fail(format, line, "invalid integer '" + std::string(tok) + "'");
  return v;
}

}  // namespace qmoney::detail
