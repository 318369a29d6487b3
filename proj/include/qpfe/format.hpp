#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace qpfe {

/// Shortest round-trip decimal form of a double; deterministic across runs.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// 17 significant digits, enough to reproduce the double exactly.
inline std::string format_sig17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace qpfe
