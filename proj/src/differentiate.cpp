#include "planar/expr.hpp"

#include <unordered_map>

namespace planar {

namespace {

bool is_zero(const Expr& e) { return e.is_constant(0.0); }
bool is_one(const Expr& e) { return e.is_constant(1.0); }

// Light folding keeps raw derivatives from filling up with 0*... and 1*... terms.
Expr add(const Expr& a, const Expr& b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return a + b;
}

Expr sub(const Expr& a, const Expr& b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) return -b;
  return a - b;
}

Expr mul(const Expr& a, const Expr& b) {
  if (is_zero(a) || is_zero(b)) return Expr(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return a * b;
}

Expr div(const Expr& a, const Expr& b) {
  if (is_zero(a)) return Expr(0.0);
  if (is_one(b)) return a;
  return a / b;
}

class Differ {
 public:
  explicit Differ(Var v) : v_(v) {}

  Expr d(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr r = compute(e);
    memo_.emplace(e.id(), r);
    return r;
  }

 private:
  Expr compute(const Expr& e) {
    const auto k = e.children();
    switch (e.op()) {
      case Op::Constant:
      case Op::Parameter:
        return Expr(0.0);
      case Op::Variable:
        return Expr(e.var() == v_ ? 1.0 : 0.0);
      case Op::Add: {
        Expr acc(0.0);
        for (const auto& c : k) acc = add(acc, d(c));
        return acc;
      }
      case Op::Sub:
        return sub(d(k[0]), d(k[1]));
      case Op::Neg: {
        Expr da = d(k[0]);
        return is_zero(da) ? da : -da;
      }
      case Op::Mul: {
        Expr acc(0.0);
        for (std::size_t i = 0; i < k.size(); ++i) {
          Expr term = d(k[i]);
          if (is_zero(term)) continue;
          for (std::size_t j = 0; j < k.size(); ++j)
            if (j != i) term = mul(term, k[j]);
          acc = add(acc, term);
        }
        return acc;
      }
      case Op::Div: {
        Expr da = d(k[0]);
        Expr db = d(k[1]);
        if (is_zero(db)) return div(da, k[1]);
        // b^-2 rather than 1/b^2: the normal form expands b^2, and the
        // expanded base would no longer cancel against b.
        return mul(sub(mul(da, k[1]), mul(k[0], db)), pow(k[1], Expr(-2.0)));
      }
      case Op::Pow: {
        const Expr& b = k[0];
        const Expr& x = k[1];
        Expr db = d(b);
        if (!depends_on(x, v_)) {
          if (is_zero(db)) return Expr(0.0);
          Expr lowered = x.is_constant() ? Expr(x.value() - 1.0) : x - Expr(1.0);
          Expr p = is_one(lowered) ? b : pow(b, lowered);
          return mul(mul(x, p), db);
        }
        Expr dx = d(x);
        // b^x (x' ln b + x b'/b)
        return mul(e, add(mul(dx, ln(b)), div(mul(x, db), b)));
      }
      case Op::Sin:
        return mul(cos(k[0]), d(k[0]));
      case Op::Cos: {
        Expr da = d(k[0]);
        if (is_zero(da)) return da;
        return -mul(sin(k[0]), da);
      }
      case Op::Exp:
        return mul(e, d(k[0]));
      case Op::Ln:
        return div(d(k[0]), k[0]);
      case Op::Sqrt:
        return div(d(k[0]), mul(Expr(2.0), e));
      case Op::Abs:
        return mul(div(k[0], e), d(k[0]));
      default:
        throw std::logic_error("differentiate: unknown operator");
    }
  }

  Var v_;
  std::unordered_map<const Expr::Node*, Expr> memo_;
};

}  // namespace

Expr differentiate(const Expr& e, Var v) { return Differ(v).d(e); }

}  // namespace planar
