// Shortest round-trip decimal text for doubles, shared by the CSV writers.
#pragma once

#include <charconv>
#include <string>

namespace planar::detail {

inline std::string number(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

}  // namespace planar::detail
