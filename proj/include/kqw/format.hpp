#pragma once

#include <cstdio>
#include <string>

namespace kqw {

/// Shortest-safe lossless text form of a double (17 significant digits).
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace kqw
