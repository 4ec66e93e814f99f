#pragma once

#include <cstdio>
#include <string>

namespace bdp::csv {

// 17 significant digits: doubles round-trip losslessly through text.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace bdp::csv
