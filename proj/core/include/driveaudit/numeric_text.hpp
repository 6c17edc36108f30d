#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "driveaudit/errors.hpp"

namespace driveaudit {

// Shortest decimal form that parses back to the same double; used for all
// machine-readable output so values survive a round trip bit-for-bit.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ParseError(where, "bad number '" + std::string(text) + "'");
  }
  return v;
}

inline long long parse_int(std::string_view text, const std::string& where) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ParseError(where, "bad integer '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace driveaudit
