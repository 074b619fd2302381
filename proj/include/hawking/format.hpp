#pragma once

#include <cstdio>
#include <string>

namespace hawking {

// Shortest round-trip safe text for a double; output files use this for
// every floating point field so reruns are byte identical.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace hawking
