#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace qdecay {

/// Shortest round-trip decimal representation of a double.  Byte-stable
/// across runs and platforms with IEEE-754 doubles, which keeps golden
/// outputs reproducible.
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace qdecay
