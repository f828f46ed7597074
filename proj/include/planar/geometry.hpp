// Coordinate mappings x = f(y): Jacobians, polar decomposition, metric
// tensors and the transformed Helmholtz decomposition.
#pragma once

#include "planar/errors.hpp"
#include "planar/fields.hpp"
#include "planar/helmholtz.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>
#include <functional>
#include <optional>
#include <string>

namespace planar {

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

template <typename Scalar>
struct PolarFactors {
  Matrix2<Scalar> Q;
  Matrix2<Scalar> h;
  int detQ = 1;
};

/// J = Q h with h the symmetric square root of J^T J, from the closed form
/// sqrt(M) = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M)).
/// Throws SingularJacobian if |det J| < 1e-14.
template <typename Scalar>
PolarFactors<Scalar> polar_decompose(const Matrix2<Scalar>& J);

struct Mapping2 {
  Expr f1;
  Expr f2;
  /// Symbolic inverse y = (g1(x), g2(x)), if known.
  std::optional<std::array<Expr, 2>> inverse;
  /// Numeric inverse, used when no symbolic one exists (e.g. atan2).
  std::function<Point2(const Point2&)> numeric_inverse;
  /// Region of y where the mapping is declared regular.
  Grid2 domain;
  std::string note;

  Point2 operator()(const Point2& y, double t = 0.0, const ParamMap& params = {}) const {
    return {evaluate(f1, y, t, params), evaluate(f2, y, t, params)};
  }

  /// y = f^-1(x); throws DomainError when no inverse is available.
  Point2 invert(const Point2& x, const ParamMap& params = {}) const;

  static Mapping2 identity(const Grid2& domain = Grid2::square(-2, 2, 32));
  /// (A, phi) -> (A cos phi, A sin phi) on A in [0.1, 3], phi in [-pi, pi].
  static Mapping2 polar();
};

/// Entry (m, k) = d f_m / d y_k.
Matrix2Field jacobian(const Mapping2& f);

struct Metric {
  Matrix2Field g;
  Expr detg;
};

/// g = J^T J and det g, simplified.
Metric metric_tensor(const Mapping2& f);

struct SymbolicPolar {
  Matrix2Field Q;
  Matrix2Field h;
  int detQ = 1;
};

/// Symbolic factors when g simplifies to a diagonal matrix:
/// h = diag(sqrt g11, sqrt g22), Q = J h^-1. Empty otherwise.
std::optional<SymbolicPolar> symbolic_polar(const Mapping2& f, const ParamMap& params = {});

/// Sign of det J, sampled on a 32x32 grid over f.domain. Throws
/// SingularJacobian if |det J| < 1e-14 at a sample or the sign changes.
int jacobian_sign(const Mapping2& f, const ParamMap& params = {});

/// -g^-1 grad V~ + detQ / sqrt(det g) S grad H~ with V~ = V o f, H~ = H o f.
/// detQ / sqrt(det g) is written as 1 / det J, which agrees on the domain.
VectorField2 transform_system(const HelmholtzPair& hd, const Mapping2& f, const ParamMap& params = {});

/// The transformed pair itself: V~, H~ and the curvilinear basis of f.
HelmholtzPair transform_pair(const HelmholtzPair& hd, const Mapping2& f, const ParamMap& params = {});

/// y' = J(y)^-1 u(f(y), t).
VectorField2 pushforward(const VectorField2& u, const Mapping2& f, const ParamMap& params = {});

/// Returns Q^T, mapping original noise to transformed noise. Throws
/// NotOrthogonal if sampled |Q^T Q - I| exceeds 1e-8 on the probe.
Matrix2Field transform_noise(const Matrix2Field& Q, const Grid2& probe = Grid2::square(-2, 2, 32),
                             const ParamMap& params = {});

// ---------------------------------------------------------------------------

template <typename Scalar>
PolarFactors<Scalar> polar_decompose(const Matrix2<Scalar>& J) {
  using std::abs;
  using std::sqrt;
  const Scalar det = J.determinant();
  if (abs(det) < Scalar(1e-14)) throw SingularJacobian("polar_decompose: |det J| < 1e-14");
  const Matrix2<Scalar> M = J.transpose() * J;
  const Scalar s = abs(det);  // sqrt(det M)
  const Matrix2<Scalar> h = (M + s * Matrix2<Scalar>::Identity()) / sqrt(M.trace() + Scalar(2) * s);
  PolarFactors<Scalar> out;
  out.h = Scalar(0.5) * (h + h.transpose());
  out.Q = J * out.h.inverse();
  out.detQ = det > Scalar(0) ? 1 : -1;
  return out;
}

}  // namespace planar
