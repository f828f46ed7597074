// Matrix-multiplier exclusion of closed orbits: the flux U = N u and its
// scalar curl, the first-order ODEs for the free entry of a triangular
// ansatz N, the regions where N exists and is positive definite, and a
// numerical closed-orbit oracle used to cross-check them.
#pragma once

#include "planar/contour.hpp"
#include "planar/fields.hpp"
#include "planar/grid.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace planar {

/// (N11 u1 + N12 u2, N21 u1 + N22 u2), simplified.
std::pair<Expr, Expr> assemble_U(const VectorField2& u, const Matrix2Field& N);

/// dU1/dx2 - dU2/dx1, simplified.
Expr compute_omega(const Expr& U1, const Expr& U2);

enum class AnsatzKind {
  Upper,  // N = [[a(x1), N12], [0, b]]
  Lower,  // N = [[c, 0], [N21, d(x2)]]
};

struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::Upper;
  Expr a = Expr(1.0);
  double b = 1.0;
  double c = 1.0;
  Expr d = Expr(1.0);
  double C = 0.0;  // integration constant, see solve_N

  /// The ansatz matrix with `entry` in the free slot.
  Matrix2Field matrix(const Expr& entry) const;
};

/// p dN/ds + q N = r along lines of constant x1 (Upper, s = x2) or constant
/// x2 (Lower, s = x1). Upper: p = u2, q = du2/dx2, r = -a du1/dx2 + b du2/dx1.
/// Lower: p = u1, q = du1/dx1, r = c du1/dx2 - d du2/dx1. In both cases q is
/// dp/ds, so d(pN)/ds = r.
struct CorollaryODE {
  AnsatzKind kind = AnsatzKind::Upper;
  Var s = Var::X2;
  Expr p, q, r;

  /// Normal form dN/ds = A N + B.
  Expr A() const;
  Expr B() const;
  /// The vorticity condition written for a concrete N: zero iff N solves
  /// the ODE. Upper: -a du1/dx2 - dN/dx2 u2 - N du2/dx2 + b du2/dx1.
  /// Lower: -c du1/dx2 + dN/dx1 u1 + N du1/dx1 + d du2/dx1.
  Expr equation(const Expr& N) const;
};

/// Throws DegenerateODE when p is identically zero.
CorollaryODE corollary_ode_rhs(const VectorField2& u, const AnsatzSpec& spec, const ParamMap& params = {});

struct NSolution {
  AnsatzKind which = AnsatzKind::Upper;
  CorollaryODE ode;
  Grid2 window;
  double C = 0.0;
  /// (integral_0^s r + C) / p when r has a symbolic antiderivative.
  std::optional<Expr> closed_form;
  /// Grid-line solution; NaN where it does not exist.
  GridArray grid;
  /// Implicit curves f = 0 where p vanishes; univariate polynomial p is split
  /// into its real roots.
  std::vector<Expr> singular_curves;
  /// Nodes with |N| > 1e10, p = 0, or no solution.
  GridMask blowup_cells;
  /// Lines (index of the fixed coordinate) on which p vanishes identically.
  std::vector<int> degenerate_lines;
};

/// Integrates each grid line with adaptive RK4 from its end farthest from
/// the singular points, restarting on every sub-interval between zeros of
/// p. The start value is (integral_0^s0 r + C)/p(s0), the same family the
/// closed form uses.
NSolution solve_N(const VectorField2& u, const AnsatzSpec& spec, const Grid2& window, const ParamMap& params = {});

/// Symmetric-part criterion: N11 > 0, N22 > 0, (N12 + N21)^2 < 4 N11 N22.
GridMask positive_definite_mask(const Matrix2Field& N, const Grid2& window, const ParamMap& params = {});

struct DefinitenessMasks {
  GridMask quadratic;  // symmetric part positive definite
  GridMask entrywise;  // every structurally non-zero entry positive
};

DefinitenessMasks positive_definite_mask(const NSolution& sol, const AnsatzSpec& spec, const ParamMap& params = {});

struct ExclusionRegion {
  int id = 0;
  std::size_t cells = 0;
  double x1_min = 0, x1_max = 0, x2_min = 0, x2_max = 0;
  std::vector<int> bounding_curves;  // indices into ExclusionReport::curves
  bool bounded_by_pd = false;        // touches a cell where N is not pd
  bool touches_window = false;
  bool simply_connected = true;
};

struct ExclusionReport {
  Grid2 window;
  AnsatzKind kind = AnsatzKind::Upper;
  std::vector<Expr> curves;
  std::vector<ExclusionRegion> regions;
  Eigen::ArrayXXi labels;  // region id per node, -1 outside every region
  GridMask exists;
  GridMask pd;
  GridMask entrywise;
  NSolution solution;
  std::string caveats;

  /// Region containing every point of the polyline, if there is one.
  std::optional<int> containing_region(const std::vector<Point2>& points) const;
};

ExclusionReport exclusion_report(const VectorField2& u, const AnsatzSpec& spec, const Grid2& window,
                                 const ParamMap& params = {});

struct OrbitSearchOptions {
  double tmax = 200.0;
  double tol = 1e-6;        // recurrence distance at the section
  double settle = 0.0;      // time integrated before anchoring the section
  double local_tol = 1e-9;  // step-doubling error per step
  double h_max = 1e-3;
};

struct ClosedOrbitReport {
  Point2 seed;
  std::vector<double> t;
  std::vector<Point2> orbit;  // one period, first and last point within tol
  std::vector<Vector2> velocity;  // u at each orbit point
  double period = 0.0;
  double closure = 0.0;  // distance between the endpoints
  std::vector<int> crossings;
};

struct OrbitSearchResult {
  Point2 seed;
  std::optional<ClosedOrbitReport> orbit;
  std::string error;  // NoClosureWithinTmax message when orbit is empty
};

/// Anchors a Poincare section through the state after `settle`, normal to
/// the flow, and re-anchors at each same-direction return until two
/// consecutive returns agree within tol.
ClosedOrbitReport find_closed_orbit(const VectorField2& u, const Point2& seed, const OrbitSearchOptions& opts = {},
                                    const ParamMap& params = {});

std::vector<OrbitSearchResult> find_closed_orbits(const VectorField2& u, const std::vector<Point2>& seeds,
                                                  const OrbitSearchOptions& opts = {}, const ParamMap& params = {});

/// Sign changes of each curve function around the closed polyline.
std::vector<int> verify_crossings(const ClosedOrbitReport& orbit, const std::vector<Expr>& curves,
                                  const ParamMap& params = {});

/// Trapezoidal sum of (N u) . dl along the polyline in the direction of the
/// flow, so that a positive definite N gives a positive value.
double loop_integral(const ClosedOrbitReport& orbit, const Matrix2Field& N, const ParamMap& params = {});

/// Zero sets of the curve functions, as polylines over the window.
std::vector<NamedPolyline> curve_polylines(const std::vector<Expr>& curves, const Grid2& window,
                                           const ParamMap& params = {});

std::string to_string(AnsatzKind k);
std::string to_json(const NSolution& s);
std::string to_json(const ExclusionReport& r);
std::string to_json(const ClosedOrbitReport& r);
std::string to_json(const std::vector<OrbitSearchResult>& results);

}  // namespace planar
