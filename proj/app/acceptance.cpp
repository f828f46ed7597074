// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include "cli.hpp"
#include "generators.hpp"

#include "planar/errors.hpp"
#include "planar/figures.hpp"
#include "planar/hamiltonian.hpp"
#include "planar/langevin.hpp"
#include "planar/ode.hpp"
#include "planar/orbits.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace planar;
using planar::sym::x1;
using planar::sym::x2;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Expr P(const char* s, const ParamSet& names = {}) { return parse(s, names); }

bool symbolic_zero(const Expr& e) { return simplify(e).is_constant(0.0); }

bool same_field(const VectorField2& a, const VectorField2& b) {
  return symbolic_zero(a.u1 - b.u1) && symbolic_zero(a.u2 - b.u2);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

Outcome lienard_reconstruction() {
  testing::Fixtures fx(101);
  int bad = 0;
  for (int k = 0; k < 100; ++k) {
    const LienardSpec spec = fx.lienard();
    if (!same_field(reconstruct(lienard_decompose(spec)), spec.field())) ++bad;
  }
  return {bad == 0, std::to_string(100 - bad) + "/100 symbolic zero"};
}

Outcome harmonic_fixture() {
  const ParamSet names{"w0", "gamma", "F", "w"};
  const HelmholtzPair hd{P("gamma*x2^2/2 - F/w0*x2*cos(w*t)", names), P("w0*(x1^2 + x2^2)/2", names), Cartesian{}};
  const VectorField2 field{P("w0*x2", names), P("-gamma*x2 - w0*x1 + F/w0*cos(w*t)", names)};
  const bool exact = same_field(reconstruct(hd), field);

  const LienardSpec unit{x1, {P("gamma", names)}, P("F*cos(w*t)", names)};
  const HelmholtzPair l = lienard_decompose(unit);
  const bool lienard_ok = symbolic_zero(l.H - P("(x1^2 + x2^2)/2")) && same_field(reconstruct(l), unit.field());

  const VectorField2 drift{P("-gamma*x1*sin(x2)^2 + F/w0*cos(w*t)*sin(x2)", names),
                           P("-w0 - gamma*sin(x2)*cos(x2) + F/(w0*x1)*cos(w*t)*cos(x2)", names)};
  const ParamMap p{{"w0", 1.3}, {"gamma", 0.4}, {"F", 0.7}, {"w", 2.1}};
  const VectorField2 moved = transform_system(hd, Mapping2::polar(), p);
  const Grid2 g{0.1, 3.0, 50, -pi, pi, 50};
  double gap = 0.0;
  for (double t : {0.0, 0.4, 1.7})
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        gap = std::max(gap, (moved(g.point(i, j), t, p) - drift(g.point(i, j), t, p)).cwiseAbs().maxCoeff());
  return {exact && lienard_ok && gap <= 1e-10,
          std::string("reconstruct ") + (exact && lienard_ok ? "exact" : "MISMATCH") + ", polar gap " + fmt(gap)};
}

Outcome transformation_law() {
  testing::Fixtures fx(303);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Mapping2 f = fx.orthogonal_mapping();
    const HelmholtzPair hd = fx.helmholtz_pair();
    const VectorField2 a = transform_system(hd, f);
    const VectorField2 b = pushforward(reconstruct(hd), f);
    Grid2 g = f.domain;
    g.nx = g.ny = 16;
    for (double t : {0.0, 0.9})
      for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
          const Vector2 va = a(g.point(i, j), t), vb = b(g.point(i, j), t);
          worst = std::max(worst, (va - vb).cwiseAbs().maxCoeff() / (1.0 + vb.cwiseAbs().maxCoeff()));
        }
  }
  return {worst <= 1e-9, "20 cases, worst " + fmt(worst)};
}

const ParamSet kKL{"k", "l"};
const ParamSet kJK{"J", "K"};
const Grid2 kQuadrant{0.1, 3.0, 32, 0.1, 3.0, 32};
const Grid2 kKuramotoQuadrant{0.05, pi - 0.05, 32, 0.05, pi - 0.05, 32};

VectorField2 kermack() { return {P("-k*x1*x2", kKL), P("k*x1*x2 - l*x2", kKL)}; }
Expr kermack_alpha() { return P("1/(k*x1*x2)", kKL); }
VectorField2 kuramoto() { return {P("-J*sin(x1)*cos(x2)", kJK), P("-K*sin(x2)*cos(x1)", kJK)}; }
Expr kuramoto_alpha() { return P("sin(x2)^(J - 1)/sin(x1)^(K + 1)", kJK); }
VectorField2 strogatz() { return {P("x1*x2"), P("-(x1^2)")}; }

Outcome criterion_fixtures() {
  std::vector<std::string> failed;
  auto expect = [&](const std::string& name, const CriterionReport& r, Verdict v, bool symbolic) {
    if (r.verdict != v || (symbolic && r.mode != ZeroMode::Symbolic)) failed.push_back(name);
  };
  const ParamMap kl{{"k", 1.0}, {"l", 1.0}};
  const ParamMap jk{{"J", 1.0}, {"K", -1.0}};
  const Grid2 half{0.1, 3, 32, -2, 2, 32};
  expect("kermack", check_criterion_I(kermack(), kermack_alpha(), kQuadrant), Verdict::Hamiltonian, true);
  expect("strogatz", check_criterion_I(strogatz(), P("1/x1"), half), Verdict::Hamiltonian, true);
  expect("kuramoto", check_criterion_I(kuramoto(), kuramoto_alpha(), kKuramotoQuadrant), Verdict::Hamiltonian, true);

  const ParamSet names{"w0", "F", "w", "gamma"};
  const ParamMap p{{"w0", 1.2}, {"F", 0.8}, {"w", 1.7}, {"gamma", 0.3}};
  const VectorField2 undamped{P("F/w0*cos(w*t)*sin(x2)", names), P("-w0 + F/(w0*x1)*cos(w*t)*cos(x2)", names)};
  const Matrix2Field B = Matrix2Field::diagonal(Expr(1.0), P("1/x1"));
  const Grid2 probe{0.1, 3.0, 32, -pi, pi, 32};
  const CriterionReport forced = check_criterion_II(undamped, B, probe, {.params = p});
  expect("forced oscillator", forced, Verdict::Hamiltonian, true);
  if (!symbolic_zero(forced.alpha - x1)) failed.push_back("forced oscillator alpha");

  VectorField2 k = kermack();
  k.u2 = k.u2 - P("0.2*x2^2");
  expect("damped kermack", check_criterion_I(k, kermack_alpha(), kQuadrant, {.params = kl}), Verdict::NotHamiltonian,
         false);
  VectorField2 s = strogatz();
  s.u2 = s.u2 - P("0.3*x2");
  expect("damped strogatz", check_criterion_I(s, P("1/x1"), half), Verdict::NotHamiltonian, false);
  VectorField2 q = kuramoto();
  q.u2 = q.u2 - P("0.3*x2");
  expect("damped kuramoto", check_criterion_I(q, kuramoto_alpha(), kKuramotoQuadrant, {.params = jk}),
         Verdict::NotHamiltonian, false);
  const VectorField2 damped{undamped.u1 - P("gamma*x1*sin(x2)^2", names),
                            undamped.u2 - P("gamma*sin(x2)*cos(x2)", names)};
  expect("damped forced oscillator", check_criterion_II(damped, B, probe, {.params = p}), Verdict::NotHamiltonian,
         false);

  std::string detail = "8 fixtures";
  for (const auto& f : failed) detail += ", failed " + f;
  return {failed.empty(), detail};
}

double drift(const VectorField2& F, const HamiltonianRecovery& rec, const Point2& x0, const ParamMap& p) {
  const Trajectory tr = integrate_rk4(CompiledField2(F, p), x0, 0.0, 50.0, 1e-3, 100);
  const double h0 = rec(x0);
  double d = 0.0;
  for (const Point2& x : tr.x) d = std::max(d, std::abs(rec(x) - h0));
  return d / std::max(1.0, std::abs(h0));
}

Outcome conservation() {
  const ParamMap kl{{"k", 1.0}, {"l", 1.0}};
  const HamiltonianRecovery k =
      recover_hamiltonian(kermack(), kermack_alpha(), {1, 1}, Grid2{0.01, 5, 16, 0.01, 5, 16}, kl);
  const ParamMap jk{{"J", 1.0}, {"K", -1.0}};
  const HamiltonianRecovery q = recover_hamiltonian(kuramoto(), kuramoto_alpha(), {1, 1}, kKuramotoQuadrant, jk);
  const double dk = drift(kermack(), k, {2, 1}, kl);
  const double dq = drift(kuramoto(), q, {1, 1}, jk);
  return {k.Htilde && q.Htilde && dk <= 1e-6 && dq <= 1e-6, "kermack " + fmt(dk) + ", kuramoto " + fmt(dq)};
}

Outcome kuramoto_identity() {
  testing::Fixtures fx(606);
  double worst = 0.0;
  for (auto [J, K] : {std::pair{1.0, -1.0}, std::pair{3.0, -1.0}, std::pair{1.0 / 3, 1.0}, std::pair{1.0, 1.0}}) {
    const ParamMap p{{"J", J}, {"K", K}};
    const CompiledExpr H(P("-(sin(x2)^J)/sin(x1)^K", kJK), p);
    const CompiledExpr alt(P("K*ln(sin(x1)) - J*ln(sin(x2))", kJK), p);
    for (int n = 0; n < 10000; ++n) {
      const Point2 x(fx.uniform(0.01, pi - 0.01), fx.uniform(0.01, pi - 0.01));
      worst = std::max(worst, std::abs(H(x) + std::exp(-alt(x))));
    }
  }
  std::vector<double> levels;
  for (int k = 1; k <= 19; k += 2) levels.push_back(-0.05 * k);
  bool connectivity = true;
  std::string detail = "identity " + fmt(worst) + ";";
  for (double J : {1.0 / 3, 1.0, 3.0})
    for (double K : {-1.0, 1.0}) {
      const Fig2Panel panel = fig2_panel(J, K, 256, levels);
      const std::size_t n = panel.closed_levels.size();
      if ((K < 0) != (n > 0)) connectivity = false;
      detail += " (" + fmt(J) + "," + fmt(K) + "):" + std::to_string(n) + "/" + std::to_string(levels.size());
    }
  return {worst <= 1e-12 && connectivity, detail + " closed"};
}

AnsatzSpec upper(Expr a, double b) {
  AnsatzSpec s;
  s.kind = AnsatzKind::Upper;
  s.a = std::move(a);
  s.b = b;
  return s;
}

AnsatzSpec lower(double c, Expr d) {
  AnsatzSpec s;
  s.kind = AnsatzKind::Lower;
  s.c = c;
  s.d = std::move(d);
  return s;
}

const ParamSet kAlpha{"alpha"};
const ParamMap kVdp{{"alpha", 0.7}};
VectorField2 harmonic() { return {x2, -x1}; }
VectorField2 vanderpol() { return {x2, P("-x1 + alpha*(1 - x1^2)*x2", kAlpha)}; }
VectorField2 duffing() { return {x2, P("x1 - x1^3")}; }

Outcome corollary_closed_forms() {
  struct Case {
    std::string name;
    VectorField2 u;
    AnsatzSpec spec;
    Expr expected;
    ParamMap params;
  };
  const double a = 1.5, b = 0.5, c = 2.0, d = 0.7, al = 0.7;
  const Expr A(a), B(b), C(c), D(d), Al(al);
  const std::vector<Case> cases{
      {"harmonic upper", harmonic(), upper(A, b), (A + B) * x2 / x1, {}},
      {"harmonic lower", harmonic(), lower(c, D), (C + D) * x1 / x2, {}},
      {"vanderpol upper", vanderpol(), upper(A, b), ((A + B) * x2 + Al * B * x1 * pow(x2, 2)) / (x1 - Al * (1 - pow(x1, 2)) * x2),
       kVdp},
      {"vanderpol lower", vanderpol(), lower(c, D), (C + D) * x1 / x2 + D * Al * pow(x1, 2), kVdp},
      {"duffing upper", duffing(), upper(A, b), ((B - A) * x2 - 3 * B * pow(x1, 2) * x2) / (x1 - pow(x1, 3)), {}},
      {"duffing lower", duffing(), lower(c, D), (C * x1 + D * (pow(x1, 3) - x1)) / x2, {}},
  };
  const Grid2 window{-2.0, 2.0, 61, -2.0, 2.0, 67};
  double worst = 0.0;
  std::vector<std::vector<std::string>> found;
  for (const Case& k : cases) {
    const NSolution sol = solve_N(k.u, k.spec, window, k.params);
    const CompiledExpr exact(k.expected, k.params);
    for (int i = 0; i < window.nx; ++i)
      for (int j = 0; j < window.ny; ++j) {
        double v;
        try {
          v = exact(window.point(i, j));
        } catch (const DomainError&) {
          continue;
        }
        if (!std::isfinite(v) || std::abs(v) > 1e6 || !std::isfinite(sol.grid(i, j))) continue;
        worst = std::max(worst, std::abs(sol.grid(i, j) - v) / std::max(1.0, std::abs(v)));
      }
    std::vector<std::string> names;
    for (const Expr& e : sol.singular_curves) names.push_back(to_string(e));
    found.push_back(names);
  }
  using V = std::vector<std::string>;
  bool sets = found[0] == V{"x1"} && found[1] == V{"x2"} && found[3] == V{"x2"} && found[5] == V{"x2"} &&
              found[4] == V{to_string(simplify(x1 + 1)), "x1", to_string(simplify(x1 - 1))};
  const Grid2 coarse = Grid2::square(-2, 2, 16);
  const auto vdp = solve_N(vanderpol(), upper(A, b), coarse, kVdp).singular_curves;
  if (vdp.size() != 1) {
    sets = false;
  } else {
    const Expr ratio = simplify(vdp[0] / (x1 - Al * (1 - pow(x1, 2)) * x2));
    sets = sets && (ratio.is_constant(1.0) || ratio.is_constant(-1.0));
  }
  return {worst <= 1e-6 && sets, "grid vs closed form " + fmt(worst) + ", singular sets " + (sets ? "match" : "DIFFER")};
}

Outcome theorem_suite() {
  const Grid2 window{-3.0, 3.0, 90, -3.0, 3.0, 90};
  struct Case {
    std::string name;
    VectorField2 u;
    std::vector<Point2> seeds;
    double settle;
    ParamMap params;
  };
  const std::vector<Case> cases{{"harmonic", harmonic(), {{0.5, 0}, {1, 0}, {2, 0}}, 0, {}},
                                {"vanderpol", vanderpol(), {{0.5, 0}}, 200, kVdp},
                                {"duffing", duffing(), {{0.5, 0}, {-0.5, 0}, {0, 1}}, 0, {}}};
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> eig(0.1, 10.0), angle(0, pi);
  int orbits = 0, failures = 0;
  for (const Case& c : cases) {
    std::vector<ExclusionReport> reports;
    for (const AnsatzSpec& spec : {upper(Expr(1.0), 1.0), lower(1.0, Expr(1.0))})
      reports.push_back(exclusion_report(c.u, spec, window, c.params));
    OrbitSearchOptions opts;
    opts.settle = c.settle;
    for (const auto& res : find_closed_orbits(c.u, c.seeds, opts, c.params)) {
      if (!res.orbit) {
        ++failures;
        continue;
      }
      ++orbits;
      for (const ExclusionReport& rep : reports) {
        int crossings = 0;
        for (int n : verify_crossings(*res.orbit, rep.curves, c.params)) crossings += n;
        if (crossings < 1 || rep.containing_region(res.orbit->orbit)) ++failures;
      }
      for (int k = 0; k < 20; ++k) {
        const double th = angle(rng);
        Matrix2d R;
        R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        const Matrix2d M = R * Eigen::Vector2d(eig(rng), eig(rng)).asDiagonal() * R.transpose();
        if (!(loop_integral(*res.orbit, Matrix2Field::from_rows(M(0, 0), M(0, 1), M(1, 0), M(1, 1))) > 0)) ++failures;
      }
    }
  }
  return {orbits == 7 && failures == 0, std::to_string(orbits) + "/7 orbits, " + std::to_string(failures) + " violations"};
}

Outcome stochastic() {
  const Mapping2 polar = Mapping2::polar();
  LangevinSpec cart;
  cart.F = {x2, -x1 - Expr(0.5) * x2};
  cart.Gamma = 0.05;
  cart.dt = 1e-3;
  cart.T = 1.0;
  cart.ensemble_size = 100000;
  cart.seed = 909;
  LangevinSpec pol = transform_spec(cart, polar);
  pol.seed = 910;
  const Ensemble mapped = map_ensemble(simulate(cart, {1, 0}), polar, MapDirection::Inverse);
  const Ensemble direct = simulate(pol, {1, 0});
  const StatsReport r = compare_stats(mapped, direct, 1.0);

  cart.Gamma = pol.Gamma = 0;
  cart.ensemble_size = pol.ensemble_size = 1;
  const Point2 a = map_ensemble(simulate(cart, {1, 0}), polar, MapDirection::Inverse).at(1, 0);
  const Point2 b = simulate(pol, {1, 0}).at(1, 0);
  const double gap = (a - b).norm();
  return {r.max_abs_z <= 3 && gap <= 1e-6, "max|z| " + fmt(r.max_abs_z) + ", deterministic gap " + fmt(gap)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("planar_acceptance_" + std::to_string(std::random_device{}()));
  std::ostringstream sink;
  std::size_t files = 0, differ = 0;
  for (const char* id : {"harmonic", "duffing"}) {
    for (const char* run : {"a", "b"}) {
      const std::string out = (root / id / run).string();
      const char* argv[] = {"planar", "example", id, "--out", out.c_str(), "--seed", "5"};
      if (run_cli(7, argv, sink, sink) != 0) return {false, std::string("example ") + id + " failed"};
    }
    for (const auto& e : fs::directory_iterator(root / id / "a")) {
      ++files;
      if (slurp(e.path()) != slurp(root / id / "b" / e.path().filename())) ++differ;
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  return {files > 0 && differ == 0, std::to_string(files) + " files compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Lienard reconstruction", 5, lienard_reconstruction},
      {2, "harmonic decomposition and polar drift", 5, harmonic_fixture},
      {3, "transformation law", 30, transformation_law},
      {4, "criterion fixtures", 5, criterion_fixtures},
      {5, "conservation of recovered Hamiltonians", 30, conservation},
      {6, "Kuramoto identity and level-set connectivity", 60, kuramoto_identity},
      {7, "corollary closed forms and singular sets", 60, corollary_closed_forms},
      {8, "closed orbits cross exclusion boundaries", 120, theorem_suite},
      {9, "stochastic transformation", 300, stochastic},
      {10, "deterministic output files", 300, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs <= c.budget;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << std::setw(2) << c.id << "  " << c.name << ": " << o.detail << " ["
              << std::fixed << std::setprecision(2) << secs << " s / " << c.budget << " s]" << std::defaultfloat
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
