#include "normal_form.hpp"

#include "planar/errors.hpp"

namespace planar {

namespace detail {
namespace {

Atom variable_atom(Var v) {
  Atom a;
  a.kind = AtomKind::Variable;
  a.var = v;
  return a;
}

Monomial drop_factor(const Monomial& m, std::size_t k) {
  Monomial r;
  for (std::size_t i = 0; i < m.factors.size(); ++i)
    if (i != k) r.factors.push_back(m.factors[i]);
  return r;
}

// Splits s = a*v + b with a, b free of v.
bool split_linear(const Sum& s, Var v, Sum& a, Sum& b) {
  for (const auto& [m, c] : s.terms) {
    std::size_t hits = 0, at = 0;
    bool other = false;
    for (std::size_t i = 0; i < m.factors.size(); ++i) {
      const Factor& f = m.factors[i];
      Rational n;
      if (f.atom.kind == AtomKind::Variable && f.atom.var == v && constant_value(*f.exponent, n) && n == 1) {
        ++hits;
        at = i;
      } else if (depends_on(f.atom, v) || depends_on(*f.exponent, v)) {
        other = true;
      }
    }
    if (other || hits > 1) return false;
    Sum term;
    term.terms.emplace(hits ? drop_factor(m, at) : m, c);
    if (hits)
      a = add(a, term);
    else
      b = add(b, term);
  }
  return !a.terms.empty();
}

Sum reciprocal(const Sum& s) { return power(s, constant_sum(-1)); }

Sum integrate_factor(const Factor& f, Var v) {
  if (depends_on(*f.exponent, v)) throw NoAntiderivative("exponent depends on the integration variable");
  Rational n;
  const bool numeric = constant_value(*f.exponent, n);
  const Sum one = constant_sum(1);

  if (f.atom.kind == AtomKind::Variable) {
    if (numeric && n == -1) return apply_function(Op::Ln, apply_function(Op::Abs, atom_power(f.atom, one)));
    Sum raised = add(*f.exponent, one);
    return mul(atom_power(f.atom, raised), reciprocal(raised));
  }

  Sum a, b;
  if (!split_linear(*f.atom.arg, v, a, b)) throw NoAntiderivative("argument is not linear in the integration variable");

  if (f.atom.kind == AtomKind::Function && numeric && n == 1) {
    const Sum inv_a = reciprocal(a);
    switch (f.atom.func) {
      case Op::Sin:
        return scale(mul(apply_function(Op::Cos, *f.atom.arg), inv_a), -1);
      case Op::Cos:
        return mul(apply_function(Op::Sin, *f.atom.arg), inv_a);
      case Op::Exp:
        return mul(apply_function(Op::Exp, *f.atom.arg), inv_a);
      default:
        break;
    }
  }
  if (f.atom.kind == AtomKind::Base) {
    const Sum& base = *f.atom.arg;
    if (numeric && n == -1) return mul(apply_function(Op::Ln, apply_function(Op::Abs, base)), reciprocal(a));
    Sum raised = add(*f.exponent, one);
    return mul(power(base, raised), reciprocal(mul(raised, a)));
  }
  throw NoAntiderivative("unsupported factor");
}

}  // namespace
}  // namespace detail

Expr antiderivative(const Expr& e, Var v) {
  using namespace detail;
  const Sum s = normalize(e);
  Sum result;
  for (const auto& [m, c] : s.terms) {
    Monomial free;
    std::vector<const Factor*> bound;
    for (const auto& f : m.factors) {
      if (depends_on(f.atom, v) || depends_on(*f.exponent, v))
        bound.push_back(&f);
      else
        free.factors.push_back(f);
    }
    Sum part;
    if (bound.empty())
      part = atom_power(variable_atom(v), constant_sum(1));
    else if (bound.size() == 1)
      part = integrate_factor(*bound.front(), v);
    else
      throw NoAntiderivative("product of several factors depending on " + std::string(var_name(v)));
    Sum coeff;
    coeff.terms.emplace(std::move(free), c);
    result = add(result, mul(coeff, part));
  }
  return to_expr(result);
}

}  // namespace planar
