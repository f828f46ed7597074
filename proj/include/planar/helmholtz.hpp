// Helmholtz decompositions u = -grad V + S grad H: closed forms for the
// Lienard and modal classes, a gridded Poisson solver for sampled fields, and
// reconstruction of u from (V, H).
#pragma once

#include "planar/fields.hpp"
#include "planar/grid.hpp"

#include <iosfwd>
#include <variant>
#include <vector>

namespace planar {

struct Cartesian {};

/// Curvilinear basis of a mapped system. sqrt_detg is carried explicitly so
/// that, e.g., the modal basis uses rho rather than sqrt(rho^2).
struct Curvilinear {
  Matrix2Field g;
  Expr sqrt_detg;
  int detQ = 1;
};

using Basis = std::variant<Cartesian, Curvilinear>;

struct HelmholtzPair {
  Expr V;
  Expr H;
  Basis basis = Cartesian{};

  bool cartesian() const { return std::holds_alternative<Cartesian>(basis); }
};

/// Cartesian: (-dV/dx1 + dH/dx2, -dV/dx2 - dH/dx1).
/// Curvilinear: -g^-1 grad V + detQ / sqrt(det g) S grad H.
VectorField2 reconstruct(const HelmholtzPair& hd);

/// Where a purely time-dependent forcing term is placed.
enum class ForcingGauge { Potential, Hamiltonian };

/// x1' = x2, x2' = -p(x1) - q(x1) x2 + forcing(t), q(x1) = sum_k q[k] x1^k.
struct LienardSpec {
  Expr p;
  std::vector<Expr> q;
  Expr forcing = Expr(0.0);
  ForcingGauge gauge = ForcingGauge::Potential;

  Expr q_polynomial() const;
  VectorField2 field() const;
};

/// Truncating series solution; throws NoAntiderivative when p has no
/// symbolic antiderivative.
HelmholtzPair lienard_decompose(const LienardSpec& spec);

/// Amplitude-phase dynamics rho' = Gamma(rho) rho, theta' = Omega(rho) with
/// rho = x1, theta = x2; both polynomials in x1.
struct ModalSpec {
  Expr Gamma;
  Expr Omega;
};

HelmholtzPair modal_decompose(const ModalSpec& spec);

// ---------------------------------------------------------------------------
// Gridded fields

struct GridField {
  Grid2 grid;
  GridArray u1;
  GridArray u2;

  void validate() const;
};

GridField sample(const VectorField2& u, const Grid2& grid, double t = 0.0, const ParamMap& params = {});

enum class BoundaryConvention {
  /// V = 0 on the boundary, dH/dn = -u.t (t the counter-clockwise tangent).
  PotentialDirichlet,
  /// dV/dn = -u.n on the boundary, H = 0.
  PotentialNeumann,
};

struct PoissonOptions {
  BoundaryConvention boundary = BoundaryConvention::PotentialDirichlet;
  double tolerance = 1e-12;
  int max_iterations = 0;  // 0 picks a cap from the grid size
};

struct NumericDecomposition {
  GridArray V;
  GridArray H;
  double residual_V = 0.0;  // relative residuals of the two linear solves
  double residual_H = 0.0;
  BoundaryConvention boundary = BoundaryConvention::PotentialDirichlet;
};

/// Solves lap V = -div u and lap H = -(du2/dx1 - du1/dx2) with 5-point
/// stencils. The Neumann problem has its mean fixed to zero. Throws
/// SolverDiverged if a relative residual stays above 1e-8.
NumericDecomposition numeric_decompose(const GridField& u, const PoissonOptions& opts = {});

/// -grad V + S grad H by central differences (one-sided on the boundary).
GridField reconstruct_grid(const Grid2& grid, const GridArray& V, const GridArray& H);

/// CSV with header x1,x2,u1,u2; one row per node, x1 varying fastest.
void write_csv(std::ostream& out, const GridField& f);
GridField read_grid_csv(std::istream& in);
/// {"grid": {...}, "u1": [...], "u2": [...]}, arrays row-major with x1 fastest.
std::string to_json(const GridField& f);
GridField grid_from_json(const std::string& text);

}  // namespace planar
