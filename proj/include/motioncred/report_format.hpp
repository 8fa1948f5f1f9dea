#pragma once

#include <cstdio>
#include <string>

namespace motioncred {

/// Fixed four-decimal rendering used by every CSV report.
inline std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace motioncred
