// Symbolic planar vector fields and 2x2 matrix fields.
#pragma once

#include "planar/expr.hpp"

#include <Eigen/Core>

#include <array>

namespace planar {

using Vector2 = Eigen::Vector2d;
using Matrix2d = Eigen::Matrix2d;

/// The symplectic matrix S = [[0, 1], [-1, 0]].
inline Matrix2d symplectic() {
  Matrix2d s;
  s << 0.0, 1.0, -1.0, 0.0;
  return s;
}

struct VectorField2 {
  Expr u1;
  Expr u2;

  Vector2 operator()(const Point2& p, double t = 0.0, const ParamMap& params = {}) const {
    return {evaluate(u1, p, t, params), evaluate(u2, p, t, params)};
  }

  VectorField2 simplified() const { return {simplify(u1), simplify(u2)}; }
  VectorField2 bound(const ParamMap& params) const { return {bind(u1, params), bind(u2, params)}; }
  bool autonomous() const { return !depends_on(u1, Var::T) && !depends_on(u2, Var::T); }
};

/// Compiled pair for hot loops (integrators, grid sampling).
class CompiledField2 {
 public:
  CompiledField2() = default;
  CompiledField2(const VectorField2& u, const ParamMap& params = {}) : c1_(u.u1, params), c2_(u.u2, params) {}

  Vector2 operator()(const Point2& p, double t = 0.0) const { return {c1_(p, t), c2_(p, t)}; }

 private:
  CompiledExpr c1_, c2_;
};

/// Four expressions, row-major.
struct Matrix2Field {
  std::array<Expr, 4> a{Expr(1.0), Expr(0.0), Expr(0.0), Expr(1.0)};

  static Matrix2Field identity() { return {}; }
  static Matrix2Field diagonal(Expr d1, Expr d2) { return {{std::move(d1), Expr(0.0), Expr(0.0), std::move(d2)}}; }
  static Matrix2Field from_rows(Expr a11, Expr a12, Expr a21, Expr a22) {
    return {{std::move(a11), std::move(a12), std::move(a21), std::move(a22)}};
  }

  const Expr& operator()(int r, int c) const { return a[2 * r + c]; }
  Expr& operator()(int r, int c) { return a[2 * r + c]; }

  Matrix2d operator()(const Point2& p, double t = 0.0, const ParamMap& params = {}) const {
    Matrix2d m;
    m << evaluate(a[0], p, t, params), evaluate(a[1], p, t, params), evaluate(a[2], p, t, params),
        evaluate(a[3], p, t, params);
    return m;
  }

  Matrix2Field transpose() const { return from_rows(a[0], a[2], a[1], a[3]); }
  Matrix2Field simplified() const { return from_rows(simplify(a[0]), simplify(a[1]), simplify(a[2]), simplify(a[3])); }
  Expr determinant() const { return simplify(a[0] * a[3] - a[1] * a[2]); }
};

Matrix2Field operator*(const Matrix2Field& x, const Matrix2Field& y);
VectorField2 operator*(const Matrix2Field& m, const VectorField2& v);

/// Inverse as adj(M)/det(M), simplified.
Matrix2Field inverse(const Matrix2Field& m);

/// S times the gradient of h: (dh/dx2, -dh/dx1).
VectorField2 symplectic_gradient(const Expr& h);
VectorField2 gradient(const Expr& v);
/// d(F1)/dx1 + d(F2)/dx2, simplified.
Expr divergence(const VectorField2& f);

}  // namespace planar
