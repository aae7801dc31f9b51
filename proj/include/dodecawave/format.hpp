#pragma once

#include <cstdio>
#include <string>

namespace dodecawave {

// Round-trip exact text for a double.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace dodecawave
