// Canonical sum-of-products form used by simplify(), antiderivative() and the
// singular-locus analysis.
//
// A Sum maps monomials to exact rational coefficients. A monomial is a sorted
// list of atoms raised to exponents, and exponents are themselves Sums, so
// x1^(K+1) and (sin x2)^J stay exact. Atoms are variables, parameters,
// functions of a normalised argument, or opaque bases that could not be
// distributed (e.g. (x1 + x2)^-1).
#pragma once

#include "planar/expr.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace planar::detail {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

struct Sum;
using SumPtr = std::shared_ptr<const Sum>;

enum class AtomKind : std::uint8_t { Variable, Parameter, Function, Base };

struct Atom {
  AtomKind kind = AtomKind::Variable;
  Var var = Var::X1;
  std::string name;
  Op func = Op::Sin;
  SumPtr arg;  // function argument, or the base itself
};

struct Factor {
  Atom atom;
  SumPtr exponent;
};

struct Monomial {
  std::vector<Factor> factors;
};

int compare(const Atom& a, const Atom& b);
int compare(const Monomial& a, const Monomial& b);
int compare(const Sum& a, const Sum& b);

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
};

struct Sum {
  std::map<Monomial, Rational, MonomialLess> terms;
};

Sum normalize(const Expr& e);
Expr to_expr(const Sum& s);
Expr to_expr(const Atom& a);

Sum constant_sum(const Rational& c);
bool constant_value(const Sum& s, Rational& out);
bool is_integer(const Rational& r);
bool depends_on(const Atom& a, Var v);
bool depends_on(const Sum& s, Var v);

Sum add(const Sum& a, const Sum& b);
Sum scale(const Sum& a, const Rational& c);
Sum mul(const Sum& a, const Sum& b);
Sum power(const Sum& base, const Sum& exponent);
Sum atom_power(const Atom& a, const Sum& exponent);
Sum apply_function(Op f, const Sum& arg);

}  // namespace planar::detail
