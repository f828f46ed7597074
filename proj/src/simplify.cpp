#include "normal_form.hpp"

#include <cmath>
#include <unordered_map>

namespace planar::detail {

namespace {

int cmp(const Rational& a, const Rational& b) { return a < b ? -1 : (b < a ? 1 : 0); }

template <typename T>
int cmp_scalar(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

int compare(const Atom& a, const Atom& b) {
  if (int c = cmp_scalar(a.kind, b.kind)) return c;
  switch (a.kind) {
    case AtomKind::Variable:
      return cmp_scalar(a.var, b.var);
    case AtomKind::Parameter:
      return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
    case AtomKind::Function:
      if (int c = cmp_scalar(a.func, b.func)) return c;
      return compare(*a.arg, *b.arg);
    case AtomKind::Base:
      return compare(*a.arg, *b.arg);
  }
  return 0;
}

namespace {
Rational degree(const Monomial& m) {
  Rational d = 0, n;
  for (const auto& f : m.factors)
    if (constant_value(*f.exponent, n)) d += n;
  return d;
}
}  // namespace

// Graded: total degree first, then lexicographic with higher powers first.
int compare(const Monomial& a, const Monomial& b) {
  if (int c = cmp(degree(a), degree(b))) return c;
  const std::size_t n = std::min(a.factors.size(), b.factors.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a.factors[i].atom, b.factors[i].atom)) return c;
    if (int c = compare(*b.factors[i].exponent, *a.factors[i].exponent)) return c;
  }
  return cmp_scalar(a.factors.size(), b.factors.size());
}

int compare(const Sum& a, const Sum& b) {
  auto ia = a.terms.begin();
  auto ib = b.terms.begin();
  for (; ia != a.terms.end() && ib != b.terms.end(); ++ia, ++ib) {
    if (int c = compare(ia->first, ib->first)) return c;
    if (int c = cmp(ia->second, ib->second)) return c;
  }
  return cmp_scalar(a.terms.size(), b.terms.size());
}

// ---------------------------------------------------------------------------
// Arithmetic

Sum constant_sum(const Rational& c) {
  Sum s;
  if (c != 0) s.terms.emplace(Monomial{}, c);
  return s;
}

bool constant_value(const Sum& s, Rational& out) {
  if (s.terms.empty()) {
    out = 0;
    return true;
  }
  if (s.terms.size() == 1 && s.terms.begin()->first.factors.empty()) {
    out = s.terms.begin()->second;
    return true;
  }
  return false;
}

bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

bool depends_on(const Atom& a, Var v) {
  switch (a.kind) {
    case AtomKind::Variable:
      return a.var == v;
    case AtomKind::Parameter:
      return false;
    default:
      return depends_on(*a.arg, v);
  }
}

bool depends_on(const Sum& s, Var v) {
  for (const auto& [m, c] : s.terms)
    for (const auto& f : m.factors)
      if (depends_on(f.atom, v) || depends_on(*f.exponent, v)) return true;
  return false;
}

namespace {

void accumulate(Sum& s, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = s.terms.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) s.terms.erase(it);
  }
}

SumPtr share(Sum s) { return std::make_shared<const Sum>(std::move(s)); }

Sum single(Monomial m) {
  Sum s;
  s.terms.emplace(std::move(m), Rational(1));
  return s;
}

// Coefficient of the first non-constant term, used to fix signs and scales.
Rational leading_coefficient(const Sum& s) {
  for (const auto& [m, c] : s.terms)
    if (!m.factors.empty()) return c;
  return s.terms.empty() ? Rational(0) : s.terms.begin()->second;
}

bool nonnegative_atom(const Atom& a) {
  return a.kind == AtomKind::Function && (a.func == Op::Exp || a.func == Op::Abs);
}

bool even_integer(const Sum& e) {
  Rational n;
  return constant_value(e, n) && is_integer(n) && boost::multiprecision::numerator(n) % 2 == 0;
}

constexpr std::size_t kMaxExpandedTerms = 4096;

bool expandable(const Sum& base, const Rational& n) {
  if (base.terms.size() <= 1) return true;
  if (n <= 0 || n > 8) return false;
  const int k = boost::multiprecision::numerator(n).convert_to<int>();
  double estimate = 1.0;
  for (int i = 0; i < k; ++i) estimate *= static_cast<double>(base.terms.size());
  return estimate <= static_cast<double>(kMaxExpandedTerms);
}

Sum canonical(const Monomial& m);

Sum mul_monomials(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors.reserve(a.factors.size() + b.factors.size());
  std::size_t i = 0, j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    int c = 0;
    if (i == a.factors.size())
      c = 1;
    else if (j == b.factors.size())
      c = -1;
    else
      c = compare(a.factors[i].atom, b.factors[j].atom);
    if (c < 0) {
      out.factors.push_back(a.factors[i++]);
    } else if (c > 0) {
      out.factors.push_back(b.factors[j++]);
    } else {
      Sum e = add(*a.factors[i].exponent, *b.factors[j].exponent);
      if (!e.terms.empty()) out.factors.push_back({a.factors[i].atom, share(std::move(e))});
      ++i, ++j;
    }
  }
  return canonical(out);
}

Monomial without(const Monomial& m, std::size_t k) {
  Monomial r;
  for (std::size_t i = 0; i < m.factors.size(); ++i)
    if (i != k) r.factors.push_back(m.factors[i]);
  return r;
}

// Rewrites that cannot be expressed by merging factors: integer powers of
// opaque bases that have become expandable, and cos^n -> cos^(n-2) (1 - sin^2).
Sum canonical(const Monomial& m) {
  for (std::size_t i = 0; i < m.factors.size(); ++i) {
    const Factor& f = m.factors[i];
    Rational n;
    if (!constant_value(*f.exponent, n) || !is_integer(n)) continue;
    if (f.atom.kind == AtomKind::Base) {
      Rational b;
      if (constant_value(*f.atom.arg, b) || !expandable(*f.atom.arg, n)) continue;
      return mul(power(*f.atom.arg, constant_sum(n)), canonical(without(m, i)));
    }
    if (f.atom.kind == AtomKind::Function && f.atom.func == Op::Cos && n >= 2) {
      Atom s = f.atom;
      s.func = Op::Sin;
      Sum one_minus_sin2 = add(constant_sum(1), scale(atom_power(s, constant_sum(2)), -1));
      Sum rest = mul(canonical(without(m, i)), atom_power(f.atom, constant_sum(n - 2)));
      return mul(rest, one_minus_sin2);
    }
  }
  return single(m);
}

Rational rational_from(double v) { return Rational(v); }

double to_double(const Rational& r) { return r.convert_to<double>(); }

Sum opaque_power(const Sum& base, const Sum& exponent) {
  Monomial m;
  Atom a;
  a.kind = AtomKind::Base;
  a.arg = share(base);
  m.factors.push_back({std::move(a), share(exponent)});
  return single(std::move(m));
}

// Exact q-th root of a non-negative integer, if it has one.
bool exact_root(const Integer& v, unsigned q, Integer& root) {
  const double guess = std::pow(v.convert_to<double>(), 1.0 / q);
  if (!std::isfinite(guess) || guess > 1e15) return false;
  const Integer g(static_cast<long long>(std::llround(guess)));
  for (Integer cand = g > 0 ? g - 1 : Integer(0); cand <= g + 1; ++cand) {
    if (boost::multiprecision::pow(cand, q) == v) {
      root = cand;
      return true;
    }
  }
  return false;
}

Sum int_power(const Sum& base, const Rational& n_rat);

Sum constant_power(const Rational& b, const Rational& n, const Sum& exponent) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (b == 1) return constant_sum(1);
  if (b == 0) return n > 0 ? Sum{} : opaque_power(constant_sum(b), exponent);
  if (b < 0) return opaque_power(constant_sum(b), exponent);
  const Integer q = denominator(n);
  if (q <= 8) {
    Integer rn, rd;
    const unsigned qq = q.convert_to<unsigned>();
    if (exact_root(numerator(b), qq, rn) && exact_root(denominator(b), qq, rd))
      return int_power(constant_sum(Rational(rn, rd)), Rational(numerator(n)));
  }
  const double v = std::exp(to_double(n) * std::log(to_double(b)));
  if (!std::isfinite(v)) return opaque_power(constant_sum(b), exponent);
  return constant_sum(rational_from(v));
}

Sum int_power(const Sum& base, const Rational& n) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (n == 0) return constant_sum(1);
  Rational b;
  if (constant_value(base, b)) {
    if (b == 0) return n > 0 ? Sum{} : opaque_power(base, constant_sum(n));
    const Integer k = numerator(n);
    if (abs(k) > 64) {
      const double v = std::pow(to_double(b), to_double(n));
      if (!std::isfinite(v) || v == 0.0) return opaque_power(base, constant_sum(n));
      return constant_sum(rational_from(v));
    }
    const unsigned e = abs(k).convert_to<unsigned>();
    Rational r(boost::multiprecision::pow(numerator(b), e), boost::multiprecision::pow(denominator(b), e));
    return constant_sum(k < 0 ? Rational(1) / r : r);
  }
  if (base.terms.size() == 1) {
    const auto& [m, c] = *base.terms.begin();
    Monomial pm;
    for (const auto& f : m.factors) pm.factors.push_back({f.atom, share(scale(*f.exponent, n))});
    return mul(int_power(constant_sum(c), n), canonical(pm));
  }
  if (expandable(base, n)) {
    Sum r = base;
    for (int i = 1; i < numerator(n).convert_to<int>(); ++i) r = mul(r, base);
    return r;
  }
  const Rational lead = leading_coefficient(base);
  Sum scaled = scale(base, Rational(1) / lead);
  Monomial m;
  Atom a;
  a.kind = AtomKind::Base;
  a.arg = share(std::move(scaled));
  m.factors.push_back({std::move(a), share(constant_sum(n))});
  Sum out = single(std::move(m));
  return mul(int_power(constant_sum(lead), n), out);
}

bool safe_to_distribute(const Factor& f) {
  if (nonnegative_atom(f.atom)) return true;
  Rational n;
  if (!constant_value(*f.exponent, n)) return false;
  return !(is_integer(n) && boost::multiprecision::numerator(n) % 2 == 0);
}

Sum distribute_or_opaque(const Sum& base, const Sum& exponent) {
  if (base.terms.size() == 1) {
    const auto& [m, c] = *base.terms.begin();
    bool safe = c > 0;
    for (const auto& f : m.factors) safe = safe && (safe_to_distribute(f) || even_integer(*f.exponent));
    if (safe) {
      // (v^(2k))^r = |v|^(2kr) wherever the left side is defined.
      Sum pm = constant_sum(1);
      for (const auto& f : m.factors) {
        Sum e = mul(*f.exponent, exponent);
        if (safe_to_distribute(f)) {
          pm = mul(pm, atom_power(f.atom, e));
        } else {
          Atom a;
          a.kind = AtomKind::Function;
          a.func = Op::Abs;
          a.arg = share(atom_power(f.atom, constant_sum(1)));
          pm = mul(pm, atom_power(a, e));
        }
      }
      Sum coef = c == 1 ? constant_sum(1) : power(constant_sum(c), exponent);
      return mul(coef, pm);
    }
  }
  return opaque_power(base, exponent);
}

}  // namespace

Sum add(const Sum& a, const Sum& b) {
  Sum out = a;
  for (const auto& [m, c] : b.terms) accumulate(out, m, c);
  return out;
}

Sum scale(const Sum& a, const Rational& c) {
  if (c == 0) return {};
  Sum out = a;
  for (auto& [m, v] : out.terms) v *= c;
  return out;
}

namespace {

// If every term of `den_side` carries base^(-k) with base proportional to
// `poly`, rewrite poly as lead * base^1 so the product cancels instead of
// expanding into an uncancelled rational expression.
bool as_base_power(const Sum& poly, const Sum& den_side, Sum& out) {
  if (poly.terms.size() < 2) return false;
  const Rational lead = leading_coefficient(poly);
  const Sum scaled = scale(poly, Rational(1) / lead);
  for (const auto& [m, c] : den_side.terms) {
    bool found = false;
    for (const auto& f : m.factors) {
      Rational n;
      if (f.atom.kind == AtomKind::Base && constant_value(*f.exponent, n) && n < 0 &&
          compare(*f.atom.arg, scaled) == 0) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  Monomial m;
  Atom a;
  a.kind = AtomKind::Base;
  a.arg = share(scaled);
  m.factors.push_back({std::move(a), share(constant_sum(1))});
  out.terms.clear();
  out.terms.emplace(std::move(m), lead);
  return true;
}

}  // namespace

Sum mul(const Sum& a, const Sum& b) {
  Sum folded;
  if (as_base_power(b, a, folded)) return mul(a, folded);
  if (as_base_power(a, b, folded)) return mul(folded, b);
  Sum out;
  for (const auto& [ma, ca] : a.terms) {
    for (const auto& [mb, cb] : b.terms) {
      const Rational c = ca * cb;
      if (ma.factors.empty() || mb.factors.empty()) {
        accumulate(out, ma.factors.empty() ? mb : ma, c);
        continue;
      }
      for (const auto& [m, k] : mul_monomials(ma, mb).terms) accumulate(out, m, c * k);
    }
  }
  return out;
}

Sum power(const Sum& base, const Sum& exponent) {
  Rational n;
  if (constant_value(exponent, n)) {
    if (n == 0) return constant_sum(1);
    if (is_integer(n)) return int_power(base, n);
    Rational b;
    if (constant_value(base, b)) return constant_power(b, n, exponent);
    return distribute_or_opaque(base, exponent);
  }
  Rational b;
  if (constant_value(base, b)) {
    if (b == 1) return constant_sum(1);
    return opaque_power(base, exponent);
  }
  return distribute_or_opaque(base, exponent);
}

Sum atom_power(const Atom& a, const Sum& exponent) {
  if (exponent.terms.empty()) return constant_sum(1);
  Monomial m;
  m.factors.push_back({a, share(exponent)});
  return canonical(m);
}

Sum apply_function(Op f, const Sum& arg) {
  Rational c;
  if (constant_value(arg, c)) {
    switch (f) {
      case Op::Sin:
        if (c == 0) return {};
        break;
      case Op::Cos:
      case Op::Exp:
        if (c == 0) return constant_sum(1);
        break;
      case Op::Ln:
        if (c == 1) return {};
        if (c <= 0) goto keep;
        break;
      case Op::Abs:
        return constant_sum(abs(c));
      default:
        break;
    }
    {
      const double x = to_double(c);
      double v = 0.0;
      switch (f) {
        case Op::Sin:
          v = std::sin(x);
          break;
        case Op::Cos:
          v = std::cos(x);
          break;
        case Op::Exp:
          v = std::exp(x);
          break;
        case Op::Ln:
          v = std::log(x);
          break;
        default:
          goto keep;
      }
      if (std::isfinite(v)) return constant_sum(rational_from(v));
    }
  }
keep:
  Sum a = arg;
  Rational sign = 1;
  if ((f == Op::Sin || f == Op::Cos || f == Op::Abs) && leading_coefficient(a) < 0) {
    a = scale(a, -1);
    if (f == Op::Sin) sign = -1;
  }
  if (a.terms.size() == 1) {
    const auto& [m, k] = *a.terms.begin();
    if (f == Op::Abs && k > 0) {
      bool nonneg = true;
      for (const auto& fa : m.factors) nonneg = nonneg && (nonnegative_atom(fa.atom) || even_integer(*fa.exponent));
      if (nonneg) return a;
    }
    if (k == 1 && m.factors.size() == 1) {
      const Factor& only = m.factors.front();
      Rational e;
      const bool unit = constant_value(*only.exponent, e) && e == 1;
      if (unit && only.atom.kind == AtomKind::Function) {
        if (f == Op::Ln && only.atom.func == Op::Exp) return *only.atom.arg;
        if (f == Op::Exp && only.atom.func == Op::Ln) return *only.atom.arg;
      }
    }
  }
  Atom atom;
  atom.kind = AtomKind::Function;
  atom.func = f;
  atom.arg = share(std::move(a));
  return scale(atom_power(atom, constant_sum(1)), sign);
}

// ---------------------------------------------------------------------------
// Expr -> Sum

namespace {

class Normalizer {
 public:
  Sum run(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Sum s = compute(e);
    memo_.emplace(e.id(), s);
    return s;
  }

 private:
  Sum compute(const Expr& e) {
    const auto k = e.children();
    switch (e.op()) {
      case Op::Constant:
        return constant_sum(rational_from(e.value()));
      case Op::Variable: {
        Atom a;
        a.kind = AtomKind::Variable;
        a.var = e.var();
        return atom_power(a, constant_sum(1));
      }
      case Op::Parameter: {
        Atom a;
        a.kind = AtomKind::Parameter;
        a.name = e.name();
        return atom_power(a, constant_sum(1));
      }
      case Op::Add: {
        Sum s;
        for (const auto& c : k) s = add(s, run(c));
        return s;
      }
      case Op::Sub:
        return add(run(k[0]), scale(run(k[1]), -1));
      case Op::Neg:
        return scale(run(k[0]), -1);
      case Op::Mul: {
        Sum s = run(k[0]);
        for (std::size_t i = 1; i < k.size(); ++i) s = mul(s, run(k[i]));
        return s;
      }
      case Op::Div:
        return mul(run(k[0]), reciprocal(k[1]));
      case Op::Pow:
        return power(run(k[0]), run(k[1]));
      case Op::Sqrt:
        return power(run(k[0]), constant_sum(Rational(1, 2)));
      default:
        return apply_function(e.op(), run(k[0]));
    }
  }

  // 1/(a*b^n) as a^-1 b^-n, so that reciprocals of powers of sums are not
  // expanded first.
  Sum reciprocal(const Expr& d) {
    const auto k = d.children();
    switch (d.op()) {
      case Op::Pow:
        return power(run(k[0]), scale(run(k[1]), -1));
      case Op::Sqrt:
        return power(run(k[0]), constant_sum(Rational(-1, 2)));
      case Op::Mul: {
        Sum s = reciprocal(k[0]);
        for (std::size_t i = 1; i < k.size(); ++i) s = mul(s, reciprocal(k[i]));
        return s;
      }
      case Op::Div:
        return mul(reciprocal(k[0]), run(k[1]));
      default:
        return power(run(d), constant_sum(-1));
    }
  }

  std::unordered_map<const Expr::Node*, Sum> memo_;
};

}  // namespace

Sum normalize(const Expr& e) { return Normalizer().run(e); }

// ---------------------------------------------------------------------------
// Sum -> Expr

namespace {

const Integer kExactLimit = Integer(1) << 53;

bool small_integer(const Integer& v) { return abs(v) < kExactLimit; }

// Fractions with small denominators print as p/q; other exact doubles print
// as decimals so that reparsing recovers the same rational.
bool as_fraction(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (is_integer(r) || !small_integer(numerator(r)) || !small_integer(denominator(r))) return false;
  return denominator(r) <= 1024 || Rational(to_double(r)) != r;
}

Expr number(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (as_fraction(r)) return Expr(numerator(r).convert_to<double>()) / Expr(denominator(r).convert_to<double>());
  return Expr(to_double(r));
}

Expr product(std::vector<Expr> items) {
  if (items.empty()) return Expr(1.0);
  if (items.size() == 1) return items.front();
  return Expr::make(Op::Mul, std::move(items));
}

Expr power_expr(const Atom& a, const Rational& n) {
  if (n == 1) return to_expr(a);
  if (n == Rational(1, 2)) return sqrt(to_expr(a));
  return pow(to_expr(a), number(n));
}

Expr term_expr(const Monomial& m, const Rational& c) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const bool negative = c < 0;
  const Rational a = abs(c);
  std::vector<Expr> num, den;
  bool coefficient_in_front = false;
  if (a != 1) {
    if (!as_fraction(a)) {
      num.push_back(Expr(to_double(a)));
      coefficient_in_front = true;
    } else {
      if (numerator(a) != 1) {
        num.push_back(Expr(numerator(a).convert_to<double>()));
        coefficient_in_front = true;
      }
      den.push_back(Expr(denominator(a).convert_to<double>()));
    }
  }
  for (const auto& f : m.factors) {
    Rational n;
    if (constant_value(*f.exponent, n)) {
      if (n < 0)
        den.push_back(power_expr(f.atom, -n));
      else
        num.push_back(power_expr(f.atom, n));
    } else if (leading_coefficient(*f.exponent) < 0) {
      den.push_back(pow(to_expr(f.atom), to_expr(scale(*f.exponent, -1))));
    } else {
      num.push_back(pow(to_expr(f.atom), to_expr(*f.exponent)));
    }
  }
  if (negative) {
    if (coefficient_in_front)
      num.front() = Expr(-num.front().value());
    else if (num.empty())
      num.push_back(Expr(-1.0));
    else
      num.front() = -num.front();
  }
  Expr numer = product(std::move(num));
  if (den.empty()) return numer;
  return numer / product(std::move(den));
}

}  // namespace

Expr to_expr(const Atom& a) {
  switch (a.kind) {
    case AtomKind::Variable:
      return Expr::variable(a.var);
    case AtomKind::Parameter:
      return Expr::parameter(a.name);
    case AtomKind::Function:
      return Expr::make(a.func, {to_expr(*a.arg)});
    case AtomKind::Base:
      return to_expr(*a.arg);
  }
  return Expr(0.0);
}

Expr to_expr(const Sum& s) {
  if (s.terms.empty()) return Expr(0.0);
  std::vector<Expr> terms;
  terms.reserve(s.terms.size());
  for (const auto& [m, c] : s.terms) {
    if (m.factors.empty())
      terms.push_back(number(abs(c)));
    else
      terms.push_back(term_expr(m, c));
    if (m.factors.empty() && c < 0) {
      Expr& last = terms.back();
      last = last.is_constant() ? Expr(-last.value()) : -last;
    }
  }
  if (terms.size() == 1) return terms.front();
  return Expr::make(Op::Add, std::move(terms));
}

}  // namespace planar::detail

namespace planar {

Expr simplify(const Expr& e) { return detail::to_expr(detail::normalize(e)); }

}  // namespace planar
