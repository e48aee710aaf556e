// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

// Small text helpers shared by the readers: number parsing, shortest
// round-trip formatting, and the `key value...` grammar used by the
// calibration and scene files.

#ifndef FDEPTH_DETAIL_TEXT_HPP
#define FDEPTH_DETAIL_TEXT_HPP

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fdepth/error.hpp"

namespace fdepth::detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

/// Fixed-point formatting for report columns.
inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// One `key v1 v2 ...` line.
struct KeyValueEntry {
  std::string key;
  std::vector<std::string> values;
  std::size_t line = 0;
};

/// Splits a text document into key/value entries. `#` starts a comment that
/// runs to end of line; blank lines are skipped.
inline std::vector<KeyValueEntry> parse_key_values(std::string_view text) {
  std::vector<KeyValueEntry> entries;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    KeyValueEntry e;
    e.key = std::string(tokens.front());
    e.line = line_no;
    for (std::size_t i = 1; i < tokens.size(); ++i) e.values.emplace_back(tokens[i]);
    entries.push_back(std::move(e));
  }
  return entries;
}

/// Numeric values of an entry, exactly `count` of them.
inline std::vector<double> numbers(const KeyValueEntry& e, std::size_t count,
                                   const std::string& file) {
  if (e.values.size() != count) {
    throw ParseError::at_line(file, e.line,
                              "field '" + e.key + "' expects " + std::to_string(count) +
                                  " value(s), got " + std::to_string(e.values.size()));
  }
  std::vector<double> out;
  out.reserve(count);
  for (const auto& v : e.values) {
    const auto d = parse_double(v);
    if (!d) {
      throw ParseError::at_line(file, e.line,
                                "field '" + e.key + "': '" + v + "' is not a number");
    }
    out.push_back(*d);
  }
  return out;
}

inline long long integer(const KeyValueEntry& e, const std::string& file) {
  if (e.values.size() != 1) {
    throw ParseError::at_line(file, e.line, "field '" + e.key + "' expects 1 value");
  }
  const auto v = parse_int(e.values.front());
  if (!v) {
    throw ParseError::at_line(file, e.line,
                              "field '" + e.key + "': '" + e.values.front() +
                                  "' is not an integer");
  }
  return *v;
}

}  // namespace fdepth::detail

#endif  // FDEPTH_DETAIL_TEXT_HPP
