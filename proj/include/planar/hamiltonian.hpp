// Hidden Hamiltonian structure: divergence criteria for alpha F and
// F / det B, line-integral recovery of the conserved quantity, and the
// curves where alpha degenerates.
#pragma once

#include "planar/fields.hpp"
#include "planar/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace planar {

enum class Verdict { Hamiltonian, NotHamiltonian, Inconclusive };

std::string to_string(Verdict v);

/// The implicit curve {curve = 0}. `pole` marks a zero of a denominator.
struct SingularLocus {
  Expr curve;
  bool pole = true;
  bool in_window = false;  // curve changes sign or vanishes on the window
};

struct SingularSet {
  std::vector<SingularLocus> curves;
  /// Grid nodes where alpha is undefined, |alpha| > 1e12 or |alpha| < 1e-12.
  GridMask cells;
  Grid2 window;
};

/// Zero sets of the factors of alpha that depend on x1 or x2 (parameters are
/// assumed nonzero), plus a sampled mask of degenerate nodes.
SingularSet singular_loci(const Expr& alpha, const Grid2& window, const ParamMap& params = {});

struct CriterionOptions {
  double tol = 1e-10;
  ParamMap params;
  std::vector<double> times{0.0, 0.37, 1.3};
};

struct CriterionReport {
  Verdict verdict = Verdict::Inconclusive;
  ZeroMode mode = ZeroMode::Symbolic;
  double residual = 0.0;  // max sampled |div(alpha F)|
  Expr alpha;
  Expr divergence;
  SingularSet singular;
  std::string note;
};

/// div(alpha F) == 0 on the probe. Inconclusive when alpha is not positive
/// at some defined probe point.
CriterionReport check_criterion_I(const VectorField2& F, const Expr& alpha, const Grid2& probe,
                                  const CriterionOptions& opts = {});

/// check_criterion_I with alpha = 1 / det B. Throws SingularDiffusion where
/// |det B| < 1e-14 at a probe point.
CriterionReport check_criterion_II(const VectorField2& F, const Matrix2Field& B, const Grid2& probe,
                                   const CriterionOptions& opts = {});

/// Tries alpha = x1^i x2^j for |i|, |j| <= max_degree (smallest |i| + |j|
/// first) and returns the first that passes criterion I and is positive on
/// the probe.
std::optional<Expr> find_monomial_alpha(const VectorField2& F, const Grid2& probe, int max_degree = 2,
                                        const CriterionOptions& opts = {});

struct HamiltonianRecovery {
  std::optional<Expr> Htilde;  // symbolic when both path integrals close
  GridArray grid;              // H~ at the nodes of `region`
  Grid2 region;
  Point2 basepoint;
  Expr alpha;
  Expr inv_sqrt_detg;  // 1 / alpha
  double residual = 0.0;  // sampled |alpha F - S grad H~|
  ParamMap params;

  /// H~ at a point of the region; the symbolic form when available, else a
  /// Simpson path integral from the basepoint.
  double operator()(const Point2& x, double t = 0.0) const;

 private:
  friend HamiltonianRecovery recover_hamiltonian(const VectorField2&, const Expr&, const Point2&, const Grid2&,
                                                 const ParamMap&);
  VectorField2 gradient_;  // (-alpha F2, alpha F1)
};

/// H~(x) = integral of (-alpha F2, alpha F1) along the axis-aligned path
/// basepoint -> (x1, b2) -> x, normalised so H~(basepoint) = 0. Throws
/// PathCrossesSingularity when alpha degenerates on the region, and
/// NotClosedForm when criterion I fails there.
HamiltonianRecovery recover_hamiltonian(const VectorField2& F, const Expr& alpha, const Point2& basepoint,
                                        const Grid2& region, const ParamMap& params = {});

std::string to_json(const CriterionReport& r);
std::string to_json(const HamiltonianRecovery& r);

}  // namespace planar
