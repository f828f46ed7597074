#include "planar/fields.hpp"

namespace planar {

Matrix2Field operator*(const Matrix2Field& x, const Matrix2Field& y) {
  Matrix2Field r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = simplify(x(i, 0) * y(0, j) + x(i, 1) * y(1, j));
  return r;
}

VectorField2 operator*(const Matrix2Field& m, const VectorField2& v) {
  return {simplify(m(0, 0) * v.u1 + m(0, 1) * v.u2), simplify(m(1, 0) * v.u1 + m(1, 1) * v.u2)};
}

Matrix2Field inverse(const Matrix2Field& m) {
  const Expr det = m.determinant();
  return Matrix2Field::from_rows(simplify(m(1, 1) / det), simplify(-m(0, 1) / det), simplify(-m(1, 0) / det),
                                 simplify(m(0, 0) / det));
}

VectorField2 symplectic_gradient(const Expr& h) {
  return {simplify(differentiate(h, Var::X2)), simplify(-differentiate(h, Var::X1))};
}

VectorField2 gradient(const Expr& v) {
  return {simplify(differentiate(v, Var::X1)), simplify(differentiate(v, Var::X2))};
}

Expr divergence(const VectorField2& f) {
  return simplify(differentiate(f.u1, Var::X1) + differentiate(f.u2, Var::X2));
}

}  // namespace planar
