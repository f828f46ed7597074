#include "planar/geometry.hpp"

#include <numbers>

namespace planar {

Point2 Mapping2::invert(const Point2& x, const ParamMap& params) const {
  if (inverse) return {evaluate((*inverse)[0], x, 0.0, params), evaluate((*inverse)[1], x, 0.0, params)};
  if (numeric_inverse) return numeric_inverse(x);
  throw DomainError("mapping has no inverse");
}

Mapping2 Mapping2::identity(const Grid2& domain) {
  Mapping2 m;
  m.f1 = sym::x1;
  m.f2 = sym::x2;
  m.inverse = std::array<Expr, 2>{sym::x1, sym::x2};
  m.domain = domain;
  m.note = "identity";
  return m;
}

Mapping2 Mapping2::polar() {
  Mapping2 m;
  m.f1 = sym::x1 * cos(sym::x2);
  m.f2 = sym::x1 * sin(sym::x2);
  m.numeric_inverse = [](const Point2& x) { return Point2(std::hypot(x.x(), x.y()), std::atan2(x.y(), x.x())); };
  m.domain = {0.1, 3.0, 32, -std::numbers::pi, std::numbers::pi, 32};
  m.note = "amplitude-phase coordinates (A, phi) = (x1, x2); singular at A = 0";
  return m;
}

Matrix2Field jacobian(const Mapping2& f) {
  return Matrix2Field::from_rows(simplify(differentiate(f.f1, Var::X1)), simplify(differentiate(f.f1, Var::X2)),
                                 simplify(differentiate(f.f2, Var::X1)), simplify(differentiate(f.f2, Var::X2)));
}

Metric metric_tensor(const Mapping2& f) {
  const Matrix2Field J = jacobian(f);
  Metric m;
  m.g = J.transpose() * J;
  m.detg = m.g.determinant();
  return m;
}

int jacobian_sign(const Mapping2& f, const ParamMap& params) {
  Grid2 probe = f.domain;
  probe.nx = 32;
  probe.ny = 32;
  probe.validate();
  const CompiledExpr det(jacobian(f).determinant(), params);
  int sign = 0;
  for (int i = 0; i < probe.nx; ++i) {
    for (int j = 0; j < probe.ny; ++j) {
      double d;
      try {
        d = det(probe.point(i, j));
      } catch (const DomainError&) {
        continue;
      }
      if (std::fabs(d) < 1e-14) throw SingularJacobian("det J vanishes on the mapping's domain");
      const int s = d > 0 ? 1 : -1;
      if (sign != 0 && s != sign) throw SingularJacobian("det J changes sign on the mapping's domain");
      sign = s;
    }
  }
  if (sign == 0) throw DomainError("det J is undefined on the whole mapping domain");
  return sign;
}

std::optional<SymbolicPolar> symbolic_polar(const Mapping2& f, const ParamMap& params) {
  const Matrix2Field J = jacobian(f);
  const Metric m = metric_tensor(f);
  if (!m.g(0, 1).is_constant(0.0)) {
    ZeroTestOptions opts;
    opts.params = &params;
    Grid2 probe = f.domain;
    probe.nx = probe.ny = 32;
    if (!is_identically_zero(m.g(0, 1), probe, opts).zero) return std::nullopt;
  }
  SymbolicPolar p;
  p.h = Matrix2Field::diagonal(simplify(sqrt(m.g(0, 0))), simplify(sqrt(m.g(1, 1))));
  p.Q = J * Matrix2Field::diagonal(simplify(Expr(1.0) / p.h(0, 0)), simplify(Expr(1.0) / p.h(1, 1)));
  p.detQ = jacobian_sign(f, params);
  return p;
}

HelmholtzPair transform_pair(const HelmholtzPair& hd, const Mapping2& f, const ParamMap& params) {
  if (!hd.cartesian()) throw std::invalid_argument("transform_pair: Helmholtz pair must be Cartesian");
  const int detQ = jacobian_sign(f, params);
  const std::map<Var, Expr> sub{{Var::X1, f.f1}, {Var::X2, f.f2}};
  HelmholtzPair out;
  out.V = simplify(substitute(hd.V, sub));
  out.H = simplify(substitute(hd.H, sub));
  const Metric m = metric_tensor(f);
  out.basis = Curvilinear{m.g, simplify(Expr(static_cast<double>(detQ)) * jacobian(f).determinant()), detQ};
  return out;
}

VectorField2 transform_system(const HelmholtzPair& hd, const Mapping2& f, const ParamMap& params) {
  return reconstruct(transform_pair(hd, f, params));
}

VectorField2 pushforward(const VectorField2& u, const Mapping2& f, const ParamMap& params) {
  jacobian_sign(f, params);
  const std::map<Var, Expr> sub{{Var::X1, f.f1}, {Var::X2, f.f2}};
  const VectorField2 composed{substitute(u.u1, sub), substitute(u.u2, sub)};
  return inverse(jacobian(f)) * composed;
}

Matrix2Field transform_noise(const Matrix2Field& Q, const Grid2& probe, const ParamMap& params) {
  probe.validate();
  std::size_t defined = 0;
  for (int i = 0; i < probe.nx; ++i) {
    for (int j = 0; j < probe.ny; ++j) {
      Matrix2d q;
      try {
        q = Q(probe.point(i, j), 0.0, params);
      } catch (const DomainError&) {
        continue;
      }
      ++defined;
      const double dev = (q.transpose() * q - Matrix2d::Identity()).cwiseAbs().maxCoeff();
      if (!(dev <= 1e-8)) throw NotOrthogonal("Q^T Q deviates from I by " + std::to_string(dev));
    }
  }
  if (defined == 0) throw DomainError("Q is undefined on the whole probe");
  return Q.transpose();
}

}  // namespace planar
