#include "planar/expr.hpp"

#include "planar/errors.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace planar {

struct Expr::Node {
  Op op = Op::Constant;
  double value = 0.0;
  Var var = Var::X1;
  std::string name;
  std::vector<Expr> kids;
};

namespace {

std::size_t arity_min(Op op) {
  switch (op) {
    case Op::Constant:
    case Op::Variable:
    case Op::Parameter:
      return 0;
    case Op::Add:
    case Op::Mul:
    case Op::Sub:
    case Op::Div:
    case Op::Pow:
      return 2;
    default:
      return 1;
  }
}

bool is_nary(Op op) { return op == Op::Add || op == Op::Mul; }

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->value = value;
  node_ = std::move(n);
}

Expr Expr::constant(double value) { return Expr(value); }

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Variable;
  n->var = v;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::parameter(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Parameter;
  n->name = std::move(name);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make(Op op, std::vector<Expr> children) {
  const std::size_t need = arity_min(op);
  const bool ok = is_nary(op) ? children.size() >= need : children.size() == need;
  if (!ok || need == 0) throw std::invalid_argument("Expr::make: wrong arity for operator");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->kids = std::move(children);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
Var Expr::var() const { return node_->var; }
const std::string& Expr::name() const { return node_->name; }
std::span<const Expr> Expr::children() const { return node_->kids; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& na = *a.node_;
  const auto& nb = *b.node_;
  if (na.op != nb.op) return false;
  switch (na.op) {
    case Op::Constant:
      return std::bit_cast<std::uint64_t>(na.value) == std::bit_cast<std::uint64_t>(nb.value);
    case Op::Variable:
      return na.var == nb.var;
    case Op::Parameter:
      return na.name == nb.name;
    default:
      return na.kids == nb.kids;
  }
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(Op::Add, {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(Op::Sub, {a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(Op::Mul, {a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(Op::Div, {a, b}); }
Expr operator-(const Expr& a) { return Expr::make(Op::Neg, {a}); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::make(Op::Pow, {base, exponent}); }
Expr sin(const Expr& e) { return Expr::make(Op::Sin, {e}); }
Expr cos(const Expr& e) { return Expr::make(Op::Cos, {e}); }
Expr exp(const Expr& e) { return Expr::make(Op::Exp, {e}); }
Expr ln(const Expr& e) { return Expr::make(Op::Ln, {e}); }
Expr sqrt(const Expr& e) { return Expr::make(Op::Sqrt, {e}); }
Expr abs(const Expr& e) { return Expr::make(Op::Abs, {e}); }

std::string_view var_name(Var v) {
  switch (v) {
    case Var::X1:
      return "x1";
    case Var::X2:
      return "x2";
    case Var::T:
      return "t";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Traversals

namespace {

Expr rebuild_with(const Expr& e, std::vector<Expr> kids) {
  if (std::equal(kids.begin(), kids.end(), e.children().begin(), e.children().end(),
                 [](const Expr& a, const Expr& b) { return a.id() == b.id(); }))
    return e;
  return Expr::make(e.op(), std::move(kids));
}

template <typename Leaf>
Expr transform(const Expr& e, const Leaf& leaf, std::unordered_map<const Expr::Node*, Expr>& memo) {
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  Expr out;
  if (e.children().empty()) {
    out = leaf(e);
  } else {
    std::vector<Expr> kids;
    kids.reserve(e.children().size());
    for (const auto& k : e.children()) kids.push_back(transform(k, leaf, memo));
    out = rebuild_with(e, std::move(kids));
  }
  memo.emplace(e.id(), out);
  return out;
}

}  // namespace

Expr substitute(const Expr& e, const std::map<Var, Expr>& replacements) {
  std::unordered_map<const Expr::Node*, Expr> memo;
  return transform(
      e,
      [&](const Expr& leaf) {
        if (leaf.op() == Op::Variable) {
          if (auto it = replacements.find(leaf.var()); it != replacements.end()) return it->second;
        }
        return leaf;
      },
      memo);
}

Expr bind(const Expr& e, const ParamMap& params) {
  std::unordered_map<const Expr::Node*, Expr> memo;
  return transform(
      e,
      [&](const Expr& leaf) {
        if (leaf.op() == Op::Parameter) {
          if (auto it = params.find(leaf.name()); it != params.end()) return Expr(it->second);
        }
        return leaf;
      },
      memo);
}

bool depends_on(const Expr& e, Var v) {
  if (e.op() == Op::Variable) return e.var() == v;
  for (const auto& k : e.children())
    if (depends_on(k, v)) return true;
  return false;
}

namespace {
void collect_params(const Expr& e, ParamSet& out) {
  if (e.op() == Op::Parameter) out.insert(e.name());
  for (const auto& k : e.children()) collect_params(k, out);
}
}  // namespace

ParamSet parameters_of(const Expr& e) {
  ParamSet out;
  collect_params(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding levels matching the grammar: 1 expr, 2 term, 3 unary, 4 factor (pow), 5 atom.
int level(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Constant:
      return std::signbit(e.value()) ? 3 : 5;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string_view func_name(Op op) {
  switch (op) {
    case Op::Sin:
      return "sin";
    case Op::Cos:
      return "cos";
    case Op::Exp:
      return "exp";
    case Op::Ln:
      return "ln";
    case Op::Sqrt:
      return "sqrt";
    case Op::Abs:
      return "abs";
    default:
      return "";
  }
}

void format_number(double v, std::string& out) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

void print(const Expr& e, int min_level, std::string& out);

// The positive counterpart of a term that prints with a leading minus sign.
std::optional<Expr> negated(const Expr& e) {
  switch (e.op()) {
    case Op::Neg:
      return e.children()[0];
    case Op::Constant:
      if (std::signbit(e.value()) && e.value() != 0.0) return Expr(-e.value());
      return std::nullopt;
    case Op::Mul:
    case Op::Div: {
      auto first = negated(e.children()[0]);
      if (!first) return std::nullopt;
      std::vector<Expr> kids(e.children().begin(), e.children().end());
      kids[0] = *first;
      return Expr::make(e.op(), std::move(kids));
    }
    default:
      return std::nullopt;
  }
}

void print_pow_base(const Expr& e, std::string& out) {
  const int l = level(e);
  if (l == 3 || l == 5) {
    print(e, 3, out);
  } else {
    out += '(';
    print(e, 1, out);
    out += ')';
  }
}

void print(const Expr& e, int min_level, std::string& out) {
  if (level(e) < min_level) {
    out += '(';
    print(e, 1, out);
    out += ')';
    return;
  }
  const auto kids = e.children();
  switch (e.op()) {
    case Op::Constant:
      format_number(e.value(), out);
      return;
    case Op::Variable:
      out += var_name(e.var());
      return;
    case Op::Parameter:
      out += e.name();
      return;
    case Op::Add:
      print(kids[0], 1, out);
      for (std::size_t i = 1; i < kids.size(); ++i) {
        const Expr& k = kids[i];
        if (auto pos = negated(k)) {
          out += " - ";
          print(*pos, 2, out);
        } else {
          out += " + ";
          print(k, 2, out);
        }
      }
      return;
    case Op::Sub:
      print(kids[0], 1, out);
      out += " - ";
      print(kids[1], 2, out);
      return;
    case Op::Mul:
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i) out += '*';
        print(kids[i], 3, out);
      }
      return;
    case Op::Div:
      print(kids[0], 2, out);
      out += '/';
      print(kids[1], 3, out);
      return;
    case Op::Neg:
      out += '-';
      print(kids[0], 5, out);
      return;
    case Op::Pow:
      print_pow_base(kids[0], out);
      out += '^';
      print(kids[1], 3, out);
      return;
    default:
      out += func_name(e.op());
      out += '(';
      print(kids[0], 1, out);
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 1, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ParamSet& params) : s_(text), params_(params) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      Expr rhs = term();
      lhs = c == '+' ? lhs + rhs : lhs - rhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      Expr rhs = factor();
      lhs = c == '*' ? lhs * rhs : lhs / rhs;
    }
  }

  Expr factor() {
    Expr base = unary();
    if (peek() == '^') {
      ++pos_;
      return pow(base, factor());
    }
    return base;
  }

  Expr unary() {
    if (peek() == '-') {
      ++pos_;
      return -atom();
    }
    return atom();
  }

  Expr atom() {
    const char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t n = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) fail("malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string_view id = s_.substr(start, pos_ - start);

    static const std::pair<std::string_view, Op> funcs[] = {
        {"sin", Op::Sin}, {"cos", Op::Cos},   {"exp", Op::Exp},
        {"ln", Op::Ln},   {"sqrt", Op::Sqrt}, {"abs", Op::Abs}};
    for (const auto& [fname, op] : funcs) {
      if (id == fname) {
        if (peek() != '(') fail("expected '(' after " + std::string(fname));
        ++pos_;
        Expr arg = expr();
        if (peek() != ')') fail("expected ')'");
        ++pos_;
        return Expr::make(op, {arg});
      }
    }
    if (id == "x1") return Expr::variable(Var::X1);
    if (id == "x2") return Expr::variable(Var::X2);
    if (id == "t") return Expr::variable(Var::T);
    if (id == "pi") return Expr(std::numbers::pi);
    if (params_.contains(id)) return Expr::parameter(std::string(id));
    throw UnknownIdentifier(std::string(id));
  }

  std::string_view s_;
  const ParamSet& params_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const ParamSet& parameters) { return Parser(text, parameters).run(); }

}  // namespace planar
