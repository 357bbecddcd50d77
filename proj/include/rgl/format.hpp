#pragma once

#include <charconv>
#include <string>

namespace rgl {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Fixed 12-significant-digit form, for interfaces that pin their precision.
std::string format_double_12(double v);

}  // namespace rgl
