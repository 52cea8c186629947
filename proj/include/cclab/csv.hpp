#pragma once

#include <cstdio>
#include <string>

namespace cclab {

/// Shortest-safe decimal form used in every CSV output: 17 significant
/// digits round-trips any double exactly.
inline std::string fmt17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace cclab
