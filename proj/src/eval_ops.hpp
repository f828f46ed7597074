// Scalar kernels shared by the tree walker and the compiled program, so both
// paths round identically.
#pragma once

#include "planar/errors.hpp"
#include "planar/expr.hpp"

#include <cmath>

namespace planar::detail {

inline double checked(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite intermediate value");
  return v;
}

inline double ipow(double b, long long n) {
  const bool neg = n < 0;
  unsigned long long k = neg ? 0ULL - static_cast<unsigned long long>(n) : static_cast<unsigned long long>(n);
  double r = 1.0;
  while (k) {
    if (k & 1ULL) r *= b;
    k >>= 1;
    if (k) b *= b;
  }
  return neg ? 1.0 / r : r;
}

inline double power(double b, double e) {
  if (e == std::floor(e) && std::fabs(e) < 9.0e15) {
    if (b == 0.0 && e < 0.0) throw DomainError("0 raised to a negative power");
    return checked(ipow(b, static_cast<long long>(e)));
  }
  if (b > 0.0) return checked(std::exp(e * std::log(b)));
  if (b == 0.0) {
    if (e > 0.0) return 0.0;
    throw DomainError("0 raised to a negative power");
  }
  throw DomainError("negative base with non-integer exponent");
}

inline double divide(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return checked(a / b);
}

inline double apply_unary(Op op, double a) {
  switch (op) {
    case Op::Neg:
      return -a;
    case Op::Sin:
      return std::sin(a);
    case Op::Cos:
      return std::cos(a);
    case Op::Exp:
      return checked(std::exp(a));
    case Op::Ln:
      if (a <= 0.0) throw DomainError("ln of a non-positive number");
      return std::log(a);
    case Op::Sqrt:
      if (a < 0.0) throw DomainError("sqrt of a negative number");
      return std::sqrt(a);
    case Op::Abs:
      return std::fabs(a);
    default:
      throw std::logic_error("apply_unary: not a unary operator");
  }
}

}  // namespace planar::detail
