#pragma once

#include <charconv>
#include <string>

namespace veyes {

/// Shortest decimal string that round-trips the double. Deterministic across
/// runs and worker counts, unlike ostream formatting with locale state.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Strips blanks plus the NUL padding DICOM UI values carry.
inline std::string trim(const std::string& s) {
  static const std::string ws(" \t\r\n\0", 5);
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace veyes
