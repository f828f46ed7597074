#include "doctest_expr.hpp"

#include "generators.hpp"
#include "planar/errors.hpp"
#include "planar/helmholtz.hpp"

#include <cmath>
#include <sstream>

using namespace planar;
using planar::sym::x1;
using planar::sym::x2;

namespace {

bool same_field(const VectorField2& a, const VectorField2& b) {
  return simplify(a.u1 - b.u1).is_constant(0.0) && simplify(a.u2 - b.u2).is_constant(0.0);
}

Expr P(const char* s, const ParamSet& names = {}) { return parse(s, names); }

double interior_residual(const GridField& u, const NumericDecomposition& d, int margin) {
  const GridField r = reconstruct_grid(u.grid, d.V, d.H);
  const double scale = std::max(u.u1.abs().maxCoeff(), u.u2.abs().maxCoeff());
  double worst = 0.0;
  for (int i = margin; i < u.grid.nx - margin; ++i)
    for (int j = margin; j < u.grid.ny - margin; ++j)
      worst = std::max({worst, std::fabs(r.u1(i, j) - u.u1(i, j)), std::fabs(r.u2(i, j) - u.u2(i, j))});
  return worst / scale;
}

// Subtracts the mean so grids can be compared up to an additive constant.
GridArray centred(const GridArray& a) { return a - a.mean(); }

}  // namespace

TEST_CASE("reconstruct examples") {
  const ParamSet names{"w0", "gamma", "F", "w"};
  const HelmholtzPair hd{P("gamma*x2^2/2 - F/w0*x2*cos(w*t)", names), P("w0*(x1^2 + x2^2)/2", names), Cartesian{}};
  CHECK(same_field(reconstruct(hd), {P("w0*x2", names), P("-gamma*x2 - w0*x1 + F/w0*cos(w*t)", names)}));

  const VectorField2 zero = reconstruct({Expr(0.0), Expr(0.0), Cartesian{}});
  CHECK(zero.u1.is_constant(0.0));
  CHECK(zero.u2.is_constant(0.0));

  const ParamSet mw{"mu", "w"};
  HelmholtzPair modal{P("-(mu*x1^2/2 - x1^4/4)", mw), P("-w*x1^2/2", mw),
                      Curvilinear{Matrix2Field::diagonal(Expr(1.0), pow(x1, Expr(2.0))), x1, 1}};
  CHECK(same_field(reconstruct(modal), {P("mu*x1 - x1^3", mw), P("w", mw)}));
}

TEST_CASE("Lienard examples") {
  const ParamSet g{"gamma"};
  const HelmholtzPair h = lienard_decompose({x1, {P("gamma", g)}});
  CHECK(h.V == simplify(P("gamma*x2^2/2", g)));
  CHECK(h.H == simplify(P("(x1^2 + x2^2)/2")));

  const ParamSet a{"alpha"};
  const LienardSpec vdp{x1, {P("-alpha", a), Expr(0.0), P("alpha", a)}};
  const HelmholtzPair v = lienard_decompose(vdp);
  CHECK(v.V == simplify(P("alpha*(x1^2 - 1)*x2^2/2 - alpha*x2^4/12", a)));
  CHECK(v.H == simplify(P("(x1^2 + x2^2)/2 + alpha*x1*x2^3/3", a)));
  CHECK(same_field(reconstruct(v), {x2, P("-x1 + alpha*(1 - x1^2)*x2", a)}));

  const HelmholtzPair free = lienard_decompose({Expr(0.0), {Expr(0.0)}});
  CHECK(free.V.is_constant(0.0));
  CHECK(free.H == simplify(P("x2^2/2")));

  CHECK_THROWS_AS(lienard_decompose({exp(pow(x1, Expr(2.0))), {}}), NoAntiderivative);
}

TEST_CASE("Lienard reconstruction identity") {
  testing::Fixtures fx(7);
  for (int k = 0; k < 100; ++k) {
    const LienardSpec spec = fx.lienard();
    CAPTURE(spec.p);
    CAPTURE(spec.q_polynomial());
    CHECK(same_field(reconstruct(lienard_decompose(spec)), spec.field()));
  }
}

TEST_CASE("forcing gauges") {
  const ParamSet names{"F", "w"};
  LienardSpec spec{x1, {Expr(0.25)}, P("F*cos(w*t)", names)};
  const HelmholtzPair a = lienard_decompose(spec);
  spec.gauge = ForcingGauge::Hamiltonian;
  const HelmholtzPair b = lienard_decompose(spec);
  CHECK(same_field(reconstruct(a), spec.field()));
  CHECK(same_field(reconstruct(b), spec.field()));
  CHECK(depends_on(a.V, Var::T));
  CHECK_FALSE(depends_on(a.H, Var::T));
  CHECK(depends_on(b.H, Var::T));
  CHECK_FALSE(depends_on(b.V, Var::T));
}

TEST_CASE("modal examples") {
  const ParamSet mw{"mu", "w"};
  const HelmholtzPair a = modal_decompose({P("mu - x1^2", mw), P("w", mw)});
  CHECK(a.V == simplify(P("-mu*x1^2/2 + x1^4/4", mw)));
  CHECK(a.H == simplify(P("-w*x1^2/2", mw)));
  CHECK_FALSE(a.cartesian());

  const HelmholtzPair z = modal_decompose({Expr(0.0), Expr(0.0)});
  CHECK(z.V.is_constant(0.0));
  CHECK(z.H.is_constant(0.0));

  const ParamSet n{"g0", "w0", "w2"};
  const HelmholtzPair c = modal_decompose({P("g0", n), P("w0 + w2*x1^2", n)});
  CHECK(c.V == simplify(P("-g0*x1^2/2", n)));
  CHECK(c.H == simplify(P("-w0*x1^2/2 - w2*x1^4/4", n)));
}

TEST_CASE("modal reconstruction identity") {
  testing::Fixtures fx(8);
  for (int k = 0; k < 50; ++k) {
    const Expr G = fx.polynomial(x1, fx.integer(0, 4));
    const Expr W = fx.polynomial(x1, fx.integer(0, 4));
    CAPTURE(G);
    CAPTURE(W);
    CHECK(same_field(reconstruct(modal_decompose({G, W})), {G * x1, W}));
  }
}

TEST_CASE("gauge freedom") {
  testing::Fixtures fx(9);
  for (int k = 0; k < 30; ++k) {
    const HelmholtzPair hd = fx.helmholtz_pair();
    const HelmholtzPair shifted{hd.V + Expr(fx.coefficient()) + sym::p("c"), hd.H + Expr(fx.coefficient()), hd.basis};
    CHECK(same_field(reconstruct(hd), reconstruct(shifted)));
  }
}

TEST_CASE("numeric decomposition of simple fields") {
  const Grid2 grid = Grid2::square(-2, 2, 64);

  const NumericDecomposition zero = numeric_decompose(sample({Expr(0.0), Expr(0.0)}, grid));
  CHECK(zero.V.abs().maxCoeff() == 0.0);
  CHECK(zero.H.abs().maxCoeff() == 0.0);

  // Divergence-free rotation: V constant, H = r^2/2 up to a constant.
  const GridField rot = sample({x2, -x1}, grid);
  const NumericDecomposition d = numeric_decompose(rot);
  GridArray H(grid.nx, grid.ny);
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) H(i, j) = grid.point(i, j).squaredNorm() / 2;
  CHECK(d.V.abs().maxCoeff() <= 1e-12);
  CHECK((centred(d.H) - centred(H)).abs().maxCoeff() <= 1e-9);
  CHECK(d.residual_V <= 1e-8);
  CHECK(d.residual_H <= 1e-8);

  // Undamped harmonic against the closed-form pair.
  const HelmholtzPair exact = lienard_decompose({x1, {Expr(0.0)}});
  const NumericDecomposition h = numeric_decompose(sample(reconstruct(exact), grid));
  CHECK((centred(h.H) - centred(H)).abs().maxCoeff() <= 0.02 * H.abs().maxCoeff());
}

TEST_CASE("numeric residual on manufactured fields") {
  testing::Fixtures fx(10);
  const Grid2 grid{-1.5, 2.0, 48, -1.0, 1.0, 40};
  for (int k = 0; k < 10; ++k) {
    const Expr q = fx.polynomial2(2);
    // V = 0, H quadratic: exact under the default convention.
    const GridField a = sample(symplectic_gradient(q), grid);
    CHECK(interior_residual(a, numeric_decompose(a), 1) <= 1e-6);
    // V quadratic, H = 0: exact under the Neumann-potential convention.
    const GridField b = sample(gradient(-q), grid);
    CHECK(interior_residual(b, numeric_decompose(b, {BoundaryConvention::PotentialNeumann}), 1) <= 1e-6);
  }
}

TEST_CASE("numeric decomposition converges at second order away from the boundary") {
  const VectorField2 u{P("sin(x1)*cos(x2) + x2"), P("exp(0.3*x1) - x1*x2")};
  for (auto bc : {BoundaryConvention::PotentialDirichlet, BoundaryConvention::PotentialNeumann}) {
    std::vector<double> err;
    for (int n : {32, 64, 128}) {
      const GridField f = sample(u, Grid2::square(-2, 2, n));
      err.push_back(interior_residual(f, numeric_decompose(f, {bc}), n / 4));
    }
    CHECK(err[0] / err[1] > 3.5);
    CHECK(err[1] / err[2] > 3.5);
    CHECK(err[2] < 2e-4);
  }
}

TEST_CASE("numeric decomposition failures") {
  const GridField f = sample({P("sin(x1)"), P("x1*x2")}, Grid2::square(-1, 1, 40));
  PoissonOptions opts;
  opts.max_iterations = 2;
  CHECK_THROWS_AS(numeric_decompose(f, opts), SolverDiverged);

  CHECK_THROWS_AS(sample({x1, x2}, Grid2::square(-1, 1, 4)).validate(), std::invalid_argument);
  GridField bad = f;
  bad.u1(3, 3) = std::nan("");
  CHECK_THROWS_AS(numeric_decompose(bad), std::invalid_argument);
}

TEST_CASE("grid field CSV and JSON round trips") {
  const GridField f = sample({P("sin(x1)*x2"), P("exp(x2) - 1/3")}, Grid2{-1.0, 2.0, 9, -0.5, 0.5, 11});
  std::stringstream csv;
  write_csv(csv, f);
  const std::string text = csv.str();
  CHECK(text.rfind("x1,x2,u1,u2\n", 0) == 0);
  const GridField g = read_grid_csv(csv);
  CHECK(g.grid.nx == 9);
  CHECK(g.grid.ny == 11);
  CHECK((g.u1 - f.u1).abs().maxCoeff() == 0.0);
  CHECK((g.u2 - f.u2).abs().maxCoeff() == 0.0);

  const GridField h = grid_from_json(to_json(f));
  CHECK(h.grid.x1_min == f.grid.x1_min);
  CHECK(h.grid.x2_max == f.grid.x2_max);
  CHECK((h.u1 - f.u1).abs().maxCoeff() == 0.0);
  CHECK((h.u2 - f.u2).abs().maxCoeff() == 0.0);

  std::stringstream broken("x1,x2,u1,u2\n0,0,1\n");
  CHECK_THROWS_AS(read_grid_csv(broken), std::invalid_argument);
  std::stringstream header("a,b,c,d\n");
  CHECK_THROWS_AS(read_grid_csv(header), std::invalid_argument);
  CHECK_THROWS_AS(grid_from_json(R"({"grid":{"x1_min":0,"x1_max":1,"nx":8,"x2_min":0,"x2_max":1,"ny":8},"u1":[1],"u2":[1]})"),
                  std::invalid_argument);
}
