#ifndef MEMLOAD_NUMFMT_HPP
#define MEMLOAD_NUMFMT_HPP

#include <cstdio>
#include <cstdlib>
#include <string>

namespace memload {

// Pinned decimal formatting so emitted files are byte-stable across runs and
// platforms: shortest %g form at a fixed number of significant digits.
inline std::string format_sig(double x, int digits = 6) {
  if (x == 0.0) x = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

// Rounds a double through the 12-significant-digit decimal form. JSON numbers
// pass through this before serialization so files do not leak sub-rounding
// platform differences.
inline double json_round(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace memload

#endif  // MEMLOAD_NUMFMT_HPP
