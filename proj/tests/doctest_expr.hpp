#pragma once

#include "doctest.h"
#include "planar/expr.hpp"

namespace doctest {
template <>
struct StringMaker<planar::Expr> {
  static String convert(const planar::Expr& e) { return planar::to_string(e).c_str(); }
};
}  // namespace doctest
