// Symbolic expressions over (x1, x2, t) and named parameters.
//
// Expr is an immutable, reference-counted tree. Copies are cheap and share
// structure; nothing reachable from an Expr is ever mutated, so values may be
// read from any number of threads.
#pragma once

#include "planar/grid.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace planar {

enum class Var : std::uint8_t { X1, X2, T };

enum class Op : std::uint8_t {
  Constant,
  Variable,
  Parameter,
  Add,  // n-ary, >= 2 children
  Sub,
  Mul,  // n-ary, >= 2 children
  Div,
  Neg,
  Pow,
  Sin,
  Cos,
  Exp,
  Ln,
  Sqrt,
  Abs,
};

using ParamMap = std::map<std::string, double, std::less<>>;
using ParamSet = std::set<std::string, std::less<>>;

class Expr {
 public:
  struct Node;

  /// The constant 0.
  Expr();
  Expr(double value);  // NOLINT(google-explicit-constructor): literals mix freely
  Expr(int value) : Expr(static_cast<double>(value)) {}

  static Expr constant(double value);
  static Expr variable(Var v);
  static Expr parameter(std::string name);
  static Expr make(Op op, std::vector<Expr> children);

  Op op() const;
  /// Constant value; only meaningful when op() == Op::Constant.
  double value() const;
  /// Variable id; only meaningful when op() == Op::Variable.
  Var var() const;
  /// Parameter name; only meaningful when op() == Op::Parameter.
  const std::string& name() const;
  std::span<const Expr> children() const;

  bool is_constant() const { return op() == Op::Constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  /// Identity of the shared node, used for memoisation.
  const Node* id() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Canonical variables, for building expressions in code.
namespace sym {
inline const Expr x1 = Expr::variable(Var::X1);
inline const Expr x2 = Expr::variable(Var::X2);
inline const Expr t = Expr::variable(Var::T);
inline Expr p(std::string name) { return Expr::parameter(std::move(name)); }
}  // namespace sym

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr sqrt(const Expr& e);
Expr abs(const Expr& e);

std::string_view var_name(Var v);

// ---------------------------------------------------------------------------
// Text form

/// Parses the fixed expression grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' factor)?
///   unary  := '-'? atom
///   atom   := number | 'pi' | identifier | func '(' expr ')' | '(' expr ')'
/// Identifiers must be x1, x2, t or a member of `parameters`.
/// Throws SyntaxError (with byte offset) or UnknownIdentifier.
Expr parse(std::string_view text, const ParamSet& parameters = {});

/// Serialises so that parse(to_string(e)) reproduces e up to simplify().
std::string to_string(const Expr& e);

// ---------------------------------------------------------------------------
// Evaluation

/// Evaluates with real arithmetic. Throws DomainError for ln of a non-positive
/// number, division by zero, 0^negative, a negative base with a non-integer
/// exponent, sqrt of a negative number, or any non-finite intermediate.
/// Throws UnknownIdentifier for unbound parameters.
double evaluate(const Expr& e, const Point2& p, double time = 0.0, const ParamMap& params = {});

/// Flattened program for hot loops. Parameters are bound at compile time;
/// results are bit-identical to evaluate().
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const ParamMap& params = {});

  double operator()(double x1, double x2, double time = 0.0) const;
  double operator()(const Point2& p, double time = 0.0) const { return (*this)(p.x(), p.y(), time); }

  struct Instr {
    Op op;
    std::uint32_t arity;
    double value;
  };

 private:
  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
};

// ---------------------------------------------------------------------------
// Calculus and rewriting

/// Exact symbolic derivative. Not simplified; call simplify() on the result.
/// d|u| is expressed as (u / |u|) u', so evaluating it at u = 0 raises DomainError.
Expr differentiate(const Expr& e, Var v);

/// Canonical form: exact rational constant folding, identity elimination,
/// flattening and collection of like terms. Values are preserved wherever the
/// input is defined.
Expr simplify(const Expr& e);

/// Antiderivative in v, constant of integration zero. Supports sums of terms
/// whose v-dependence is v^n, 1/(linear in v), or sin/cos/exp of an argument
/// linear in v. Throws NoAntiderivative otherwise.
Expr antiderivative(const Expr& e, Var v);

/// Simultaneous substitution of variables.
Expr substitute(const Expr& e, const std::map<Var, Expr>& replacements);
/// Replaces bound parameters by constants; unbound parameters stay symbolic.
Expr bind(const Expr& e, const ParamMap& params);

bool depends_on(const Expr& e, Var v);
ParamSet parameters_of(const Expr& e);

// ---------------------------------------------------------------------------
// Zero testing

enum class ZeroMode { Symbolic, Numeric };

struct ZeroTest {
  bool zero = false;
  ZeroMode mode = ZeroMode::Symbolic;
  double max_abs = 0.0;  // largest sampled |e| (0 for a symbolic verdict)
  std::size_t defined_points = 0;
  std::size_t probe_points = 0;
};

struct ZeroTestOptions {
  double tol = 1e-10;
  /// Times at which time-dependent expressions are probed.
  std::vector<double> times{0.0, 0.37, 1.3};
  const ParamMap* params = nullptr;
  /// Optional per-point scale; the numeric verdict is |e| <= tol * scale(p, t).
  std::function<double(const Point2&, double)> scale;
};

/// True when simplify(e) is the literal 0 (symbolic), else when |e| <= tol at
/// every probe point where e is defined (numeric). Needs a probe with at least
/// 16x16 nodes. Throws DomainError if e is undefined at every probe point.
ZeroTest is_identically_zero(const Expr& e, const Grid2& probe, const ZeroTestOptions& opts = {});

}  // namespace planar
