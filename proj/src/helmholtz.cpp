#include "planar/helmholtz.hpp"

#include "planar/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <cmath>

namespace planar {

VectorField2 reconstruct(const HelmholtzPair& hd) {
  if (hd.cartesian()) {
    return {simplify(-differentiate(hd.V, Var::X1) + differentiate(hd.H, Var::X2)),
            simplify(-differentiate(hd.V, Var::X2) - differentiate(hd.H, Var::X1))};
  }
  const auto& c = std::get<Curvilinear>(hd.basis);
  const VectorField2 a = inverse(c.g) * gradient(hd.V);
  const VectorField2 s = symplectic_gradient(hd.H);
  const Expr k = Expr(static_cast<double>(c.detQ)) / c.sqrt_detg;
  return {simplify(-a.u1 + k * s.u1), simplify(-a.u2 + k * s.u2)};
}

// ---------------------------------------------------------------------------
// Lienard series

Expr LienardSpec::q_polynomial() const {
  Expr q_x(0.0);
  for (std::size_t k = 0; k < q.size(); ++k) q_x = q_x + q[k] * pow(sym::x1, Expr(static_cast<double>(k)));
  return simplify(q_x);
}

VectorField2 LienardSpec::field() const {
  return {sym::x2, simplify(-p - q_polynomial() * sym::x2 + forcing)};
}

namespace {
double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}
}  // namespace

HelmholtzPair lienard_decompose(const LienardSpec& spec) {
  using sym::x1;
  using sym::x2;
  const int M = spec.q.empty() ? 0 : static_cast<int>(spec.q.size()) - 1;
  std::vector<Expr> dq{spec.q_polynomial()};
  for (int k = 1; k <= M; ++k) dq.push_back(simplify(differentiate(dq.back(), Var::X1)));

  Expr V(0.0);
  for (int n = 0; 2 * n <= M; ++n) {
    const double sign = n % 2 ? -1.0 : 1.0;
    V = V + dq[2 * n] * (Expr(sign) / Expr(factorial(2 * n + 2))) * pow(x2, Expr(2.0 * n + 2));
  }
  Expr H = pow(x2, Expr(2.0)) / Expr(2.0) + antiderivative(spec.p, Var::X1);
  for (int n = 0; 2 * n + 1 <= M; ++n) {
    const double sign = n % 2 ? -1.0 : 1.0;
    H = H + dq[2 * n + 1] * (Expr(sign) / Expr(factorial(2 * n + 3))) * pow(x2, Expr(2.0 * n + 3));
  }
  if (spec.gauge == ForcingGauge::Potential)
    V = V - spec.forcing * x2;
  else
    H = H - spec.forcing * x1;
  return {simplify(V), simplify(H), Cartesian{}};
}

HelmholtzPair modal_decompose(const ModalSpec& spec) {
  using sym::x1;
  HelmholtzPair hd;
  hd.V = simplify(-antiderivative(spec.Gamma * x1, Var::X1));
  hd.H = simplify(-antiderivative(spec.Omega * x1, Var::X1));
  hd.basis = Curvilinear{Matrix2Field::diagonal(Expr(1.0), pow(x1, Expr(2.0))), x1, 1};
  return hd;
}

// ---------------------------------------------------------------------------
// Gridded decomposition

void GridField::validate() const {
  grid.validate();
  if (grid.nx < 8 || grid.ny < 8) throw std::invalid_argument("GridField: need at least 8x8 nodes");
  if (u1.rows() != grid.nx || u1.cols() != grid.ny || u2.rows() != grid.nx || u2.cols() != grid.ny)
    throw std::invalid_argument("GridField: sample arrays do not match the grid");
  if (!u1.allFinite() || !u2.allFinite()) throw std::invalid_argument("GridField: non-finite samples");
}

GridField sample(const VectorField2& u, const Grid2& grid, double t, const ParamMap& params) {
  grid.validate();
  const CompiledField2 f(u, params);
  GridField out{grid, GridArray(grid.nx, grid.ny), GridArray(grid.nx, grid.ny)};
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vector2 v = f(grid.point(i, j), t);
      out.u1(i, j) = v.x();
      out.u2(i, j) = v.y();
    }
  }
  return out;
}

namespace {

// Second-order differences, one-sided at the ends.
GridArray d_dx1(const GridArray& a, double h) {
  const Eigen::Index n = a.rows();
  GridArray d(a.rows(), a.cols());
  d.middleRows(1, n - 2) = (a.bottomRows(n - 2) - a.topRows(n - 2)) / (2 * h);
  d.row(0) = (-3 * a.row(0) + 4 * a.row(1) - a.row(2)) / (2 * h);
  d.row(n - 1) = (3 * a.row(n - 1) - 4 * a.row(n - 2) + a.row(n - 3)) / (2 * h);
  return d;
}

GridArray d_dx2(const GridArray& a, double h) {
  const Eigen::Index n = a.cols();
  GridArray d(a.rows(), a.cols());
  d.middleCols(1, n - 2) = (a.rightCols(n - 2) - a.leftCols(n - 2)) / (2 * h);
  d.col(0) = (-3 * a.col(0) + 4 * a.col(1) - a.col(2)) / (2 * h);
  d.col(n - 1) = (3 * a.col(n - 1) - 4 * a.col(n - 2) + a.col(n - 3)) / (2 * h);
  return d;
}

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct Solve {
  Eigen::VectorXd x;
  double residual = 0.0;
};

Solve conjugate_gradient(const SparseMatrix& A, const Eigen::VectorXd& b, const PoissonOptions& opts,
                         const Grid2& g) {
  Solve s;
  const double bn = b.norm();
  if (bn == 0.0) {
    s.x = Eigen::VectorXd::Zero(b.size());
    return s;
  }
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(opts.tolerance);
  cg.setMaxIterations(opts.max_iterations > 0 ? opts.max_iterations : 40 * (g.nx + g.ny) + 1000);
  cg.compute(A);
  s.x = cg.solve(b);
  s.residual = (b - A * s.x).norm() / bn;
  if (!(s.residual <= 1e-8))
    throw SolverDiverged("Poisson solve stalled at relative residual " + std::to_string(s.residual));
  return s;
}

double weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

// lap w = f with w = 0 on the boundary.
Solve dirichlet(const Grid2& g, const GridArray& f, const PoissonOptions& opts, GridArray& w) {
  const int mx = g.nx - 2, my = g.ny - 2;
  const double hx = g.dx1(), hy = g.dx2();
  const double cx = hy / hx, cy = hx / hy;
  auto id = [&](int i, int j) { return (i - 1) + mx * (j - 1); };
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(mx) * my * 5);
  Eigen::VectorXd b(mx * my);
  for (int j = 1; j <= my; ++j) {
    for (int i = 1; i <= mx; ++i) {
      const int k = id(i, j);
      t.emplace_back(k, k, 2 * cx + 2 * cy);
      if (i > 1) t.emplace_back(k, id(i - 1, j), -cx);
      if (i < mx) t.emplace_back(k, id(i + 1, j), -cx);
      if (j > 1) t.emplace_back(k, id(i, j - 1), -cy);
      if (j < my) t.emplace_back(k, id(i, j + 1), -cy);
      b[k] = -f(i, j) * hx * hy;
    }
  }
  SparseMatrix A(mx * my, mx * my);
  A.setFromTriplets(t.begin(), t.end());
  Solve s = conjugate_gradient(A, b, opts, g);
  w = GridArray::Zero(g.nx, g.ny);
  for (int j = 1; j <= my; ++j)
    for (int i = 1; i <= mx; ++i) w(i, j) = s.x[id(i, j)];
  return s;
}

// lap w = f with dw/dn = flux(i, j, n) on the boundary; mean of w is zero.
template <typename Flux>
Solve neumann(const Grid2& g, const GridArray& f, const Flux& flux, const PoissonOptions& opts, GridArray& w) {
  const int nx = g.nx, ny = g.ny;
  const double hx = g.dx1(), hy = g.dx2();
  auto id = [&](int i, int j) { return i + nx * j; };
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nx) * ny * 5);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nx * ny);
  auto edge = [&](int k, int m, double c) {
    t.emplace_back(k, k, c);
    t.emplace_back(m, m, c);
    t.emplace_back(k, m, -c);
    t.emplace_back(m, k, -c);
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int k = id(i, j);
      const double wx = weight(i, nx), wy = weight(j, ny);
      if (i + 1 < nx) edge(k, id(i + 1, j), wy * hy / hx);
      if (j + 1 < ny) edge(k, id(i, j + 1), wx * hx / hy);
      double boundary = 0.0;
      if (i == 0) boundary += flux(i, j, Vector2(-1, 0)) * wy * hy;
      if (i == nx - 1) boundary += flux(i, j, Vector2(1, 0)) * wy * hy;
      if (j == 0) boundary += flux(i, j, Vector2(0, -1)) * wx * hx;
      if (j == ny - 1) boundary += flux(i, j, Vector2(0, 1)) * wx * hx;
      b[k] = boundary - f(i, j) * wx * hx * wy * hy;
    }
  }
  b.array() -= b.mean();
  SparseMatrix A(nx * ny, nx * ny);
  A.setFromTriplets(t.begin(), t.end());
  Solve s = conjugate_gradient(A, b, opts, g);
  s.x.array() -= s.x.mean();
  w.resize(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) w(i, j) = s.x[id(i, j)];
  return s;
}

}  // namespace

NumericDecomposition numeric_decompose(const GridField& u, const PoissonOptions& opts) {
  u.validate();
  const Grid2& g = u.grid;
  const GridArray div = d_dx1(u.u1, g.dx1()) + d_dx2(u.u2, g.dx2());
  const GridArray curl = d_dx1(u.u2, g.dx1()) - d_dx2(u.u1, g.dx2());

  NumericDecomposition out;
  out.boundary = opts.boundary;
  if (opts.boundary == BoundaryConvention::PotentialDirichlet) {
    out.residual_V = dirichlet(g, -div, opts, out.V).residual;
    auto flux = [&](int i, int j, const Vector2& n) { return -(u.u1(i, j) * -n.y() + u.u2(i, j) * n.x()); };
    out.residual_H = neumann(g, -curl, flux, opts, out.H).residual;
  } else {
    auto flux = [&](int i, int j, const Vector2& n) { return -(u.u1(i, j) * n.x() + u.u2(i, j) * n.y()); };
    out.residual_V = neumann(g, -div, flux, opts, out.V).residual;
    out.residual_H = dirichlet(g, -curl, opts, out.H).residual;
  }
  return out;
}

GridField reconstruct_grid(const Grid2& grid, const GridArray& V, const GridArray& H) {
  grid.validate();
  const double h1 = grid.dx1(), h2 = grid.dx2();
  return {grid, -d_dx1(V, h1) + d_dx2(H, h2), -d_dx2(V, h2) - d_dx1(H, h1)};
}

}  // namespace planar
