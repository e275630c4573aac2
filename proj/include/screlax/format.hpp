#pragma once

#include <charconv>
#include <string>

namespace screlax {

/// Locale-independent rendering with 17 significant digits (round-trips doubles).
inline std::string format_real(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Fixed notation with `digits` decimals, locale-independent.
inline std::string format_fixed(double value, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

}  // namespace screlax
