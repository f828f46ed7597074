#include "planar/orbits.hpp"

#include "normal_form.hpp"
#include "planar/errors.hpp"
#include "planar/ode.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/Polynomials>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace planar {

std::pair<Expr, Expr> assemble_U(const VectorField2& u, const Matrix2Field& N) {
  return {simplify(N(0, 0) * u.u1 + N(0, 1) * u.u2), simplify(N(1, 0) * u.u1 + N(1, 1) * u.u2)};
}

Expr compute_omega(const Expr& U1, const Expr& U2) {
  return simplify(differentiate(U1, Var::X2) - differentiate(U2, Var::X1));
}

Matrix2Field AnsatzSpec::matrix(const Expr& entry) const {
  if (kind == AnsatzKind::Upper) return Matrix2Field::from_rows(a, entry, Expr(0.0), Expr(b));
  return Matrix2Field::from_rows(Expr(c), Expr(0.0), entry, d);
}

std::string to_string(AnsatzKind k) { return k == AnsatzKind::Upper ? "upper" : "lower"; }

Expr CorollaryODE::A() const { return simplify(-q / p); }
Expr CorollaryODE::B() const { return simplify(r / p); }

Expr CorollaryODE::equation(const Expr& N) const {
  const Expr lhs = p * differentiate(N, s) + q * N - r;
  return simplify(kind == AnsatzKind::Upper ? -lhs : lhs);
}

namespace {

bool zero_expr(const Expr& e) { return e.is_constant(0.0); }

void check_spec(const AnsatzSpec& spec) {
  if (!(spec.b > 0) || !(spec.c > 0)) throw std::invalid_argument("ansatz: b and c must be positive");
  if (depends_on(spec.a, Var::X2) || depends_on(spec.a, Var::T))
    throw std::invalid_argument("ansatz: a may depend on x1 only");
  if (depends_on(spec.d, Var::X1) || depends_on(spec.d, Var::T))
    throw std::invalid_argument("ansatz: d may depend on x2 only");
}

}  // namespace

CorollaryODE corollary_ode_rhs(const VectorField2& u_in, const AnsatzSpec& spec, const ParamMap& params) {
  check_spec(spec);
  const VectorField2 u = u_in.bound(params);
  if (!u.autonomous()) throw std::invalid_argument("corollary ODE: the field must be autonomous");
  CorollaryODE ode;
  ode.kind = spec.kind;
  // p, q, r stay unsimplified: re-simplifying printed coefficients such as
  // 3 * 0.7 would round them, and the closed form must cancel exactly.
  if (spec.kind == AnsatzKind::Upper) {
    ode.s = Var::X2;
    ode.p = u.u2;
    ode.q = differentiate(u.u2, Var::X2);
    ode.r = -bind(spec.a, params) * differentiate(u.u1, Var::X2) + Expr(spec.b) * differentiate(u.u2, Var::X1);
  } else {
    ode.s = Var::X1;
    ode.p = u.u1;
    ode.q = differentiate(u.u1, Var::X1);
    ode.r = Expr(spec.c) * differentiate(u.u1, Var::X2) - bind(spec.d, params) * differentiate(u.u2, Var::X1);
  }
  if (zero_expr(simplify(ode.p)))
    throw DegenerateODE(std::string("the coefficient of dN/ds (") + (spec.kind == AnsatzKind::Upper ? "u2" : "u1") +
                        ") vanishes identically");
  return ode;
}

// ---------------------------------------------------------------------------
// Singular curves

namespace {

// Coefficients (low to high) when e is a polynomial in v alone.
std::optional<std::vector<double>> univariate(const Expr& e, Var v) {
  using namespace detail;
  const Sum s = normalize(e);
  std::vector<double> coeffs;
  for (const auto& [m, c] : s.terms) {
    int degree = 0;
    for (const auto& f : m.factors) {
      Rational n;
      if (f.atom.kind != AtomKind::Variable || f.atom.var != v || !constant_value(*f.exponent, n) ||
          !is_integer(n) || n < 0 || n > 40)
        return std::nullopt;
      degree += n.convert_to<int>();
    }
    if (coeffs.size() <= static_cast<std::size_t>(degree)) coeffs.resize(degree + 1, 0.0);
    coeffs[degree] += c.convert_to<double>();
  }
  return coeffs;
}

double tidy_root(double r) {
  const double k = std::round(r);
  return std::abs(r - k) < 1e-9 ? k : r;
}

void add_curve(std::vector<Expr>& out, const Expr& c) {
  const Expr s = simplify(c);
  for (const auto& e : out)
    if (e == s || simplify(e + s).is_constant(0.0)) return;
  out.push_back(s);
}

std::vector<Expr> curves_of(const Expr& p) {
  using namespace detail;
  std::vector<Expr> out;
  for (Var v : {Var::X1, Var::X2}) {
    if (depends_on(p, v == Var::X1 ? Var::X2 : Var::X1)) continue;
    auto coeffs = univariate(p, v);
    if (!coeffs) continue;
    while (!coeffs->empty() && coeffs->back() == 0.0) coeffs->pop_back();
    if (coeffs->size() < 2) return out;
    const Expr x = Expr::variable(v);
    if (coeffs->size() == 2) {
      add_curve(out, x - Expr(tidy_root(-(*coeffs)[0] / (*coeffs)[1])));
      return out;
    }
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(coeffs->data(), static_cast<Eigen::Index>(coeffs->size()));
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(c);
    std::vector<double> roots;
    solver.realRoots(roots, 1e-9);
    std::sort(roots.begin(), roots.end());
    for (double r : roots) add_curve(out, x - Expr(tidy_root(r)));
    return out;
  }
  const Sum s = normalize(p);
  if (s.terms.size() == 1) {
    for (const auto& f : s.terms.begin()->first.factors) {
      Rational n;
      if (!constant_value(*f.exponent, n) || n <= 0) continue;
      if (!depends_on(f.atom, Var::X1) && !depends_on(f.atom, Var::X2)) continue;
      add_curve(out, f.atom.kind == AtomKind::Base ? to_expr(*f.atom.arg) : to_expr(f.atom));
    }
    return out;
  }
  add_curve(out, p);
  return out;
}

// ---------------------------------------------------------------------------
// Grid-line integration

struct LineProblem {
  CompiledExpr p, q, r;
  bool upper;
  double w;  // fixed coordinate

  Point2 at(double s) const { return upper ? Point2(w, s) : Point2(s, w); }
  double rhs(double s, double N) const {
    const Point2 x = at(s);
    return (r(x) - q(x) * N) / p(x);
  }
};

double rk4_scalar(const LineProblem& lp, double s, double N, double h) {
  const double k1 = lp.rhs(s, N);
  const double k2 = lp.rhs(s + 0.5 * h, N + 0.5 * h * k1);
  const double k3 = lp.rhs(s + 0.5 * h, N + 0.5 * h * k2);
  const double k4 = lp.rhs(s + h, N + h * k3);
  return N + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

constexpr double kBlowup = 1e10;

// Adaptive step-doubling RK4 from s0 to s1; false on blow-up.
bool advance(const LineProblem& lp, double s0, double s1, double& N, double& h) {
  const double dir = s1 > s0 ? 1.0 : -1.0;
  const double span = std::abs(s1 - s0);
  double s = s0;
  h = std::min(h, span);
  while (dir * (s1 - s) > 1e-15 * span) {
    double step = std::min(h, dir * (s1 - s));
    const double full = rk4_scalar(lp, s, N, dir * step);
    const double half = rk4_scalar(lp, s + 0.5 * dir * step, rk4_scalar(lp, s, N, 0.5 * dir * step), 0.5 * dir * step);
    const double err = std::abs(half - full) / 15.0;
    const double tol = 1e-12 * (1.0 + std::abs(half));
    if (!std::isfinite(half)) return false;
    if (err > tol && step > 1e-14 * span) {
      h = step * std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
      continue;
    }
    N = half + (half - full) / 15.0;
    s += dir * step;
    if (!std::isfinite(N) || std::abs(N) > kBlowup) return false;
    const double grow = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
    h = step * std::clamp(grow, 0.2, 4.0);
  }
  return true;
}

double initial_value(const LineProblem& lp, double s0, double C) {
  auto f = [&](double s) { return lp.r(lp.at(s)); };
  const double R = s0 == 0.0 ? 0.0 : boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, s0, 15, 1e-14);
  return (R + C) / lp.p(lp.at(s0));
}

double safe_eval(const CompiledExpr& e, const Point2& x) {
  try {
    return e(x);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

NSolution solve_N(const VectorField2& u, const AnsatzSpec& spec, const Grid2& window, const ParamMap& params) {
  window.validate();
  NSolution sol;
  sol.which = spec.kind;
  sol.window = window;
  sol.C = spec.C;
  sol.ode = corollary_ode_rhs(u, spec, params);
  const CorollaryODE& ode = sol.ode;

  try {
    const Expr R = antiderivative(ode.r, ode.s);
    const Expr R0 = substitute(R, {{ode.s, Expr(0.0)}});
    sol.closed_form = simplify((R - R0 + Expr(spec.C)) / ode.p);
  } catch (const NoAntiderivative&) {
  }
  sol.singular_curves = curves_of(simplify(ode.p));

  const bool upper = spec.kind == AnsatzKind::Upper;
  const int lines = upper ? window.nx : window.ny;
  const int n = upper ? window.ny : window.nx;
  const double ds = upper ? window.dx2() : window.dx1();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  sol.grid = GridArray::Constant(window.nx, window.ny, nan);
  sol.blowup_cells = GridMask::Constant(window.nx, window.ny, false);

  LineProblem lp{CompiledExpr(ode.p), CompiledExpr(ode.q), CompiledExpr(ode.r), upper, 0.0};
  double pscale = 0.0;
  for (int i = 0; i < window.nx; ++i)
    for (int j = 0; j < window.ny; ++j) {
      const double v = safe_eval(lp.p, window.point(i, j));
      if (std::isfinite(v)) pscale = std::max(pscale, std::abs(v));
    }
  const double pzero = 1e-13 * std::max(1.0, pscale);

  auto node = [&](int line, int k) -> std::pair<int, int> { return upper ? std::pair{line, k} : std::pair{k, line}; };
  auto s_of = [&](int k) { return upper ? window.x2(k) : window.x1(k); };

  for (int line = 0; line < lines; ++line) {
    lp.w = upper ? window.x1(line) : window.x2(line);
    std::vector<double> pv(n);
    bool any = false;
    for (int k = 0; k < n; ++k) {
      pv[k] = safe_eval(lp.p, lp.at(s_of(k)));
      if (std::isfinite(pv[k]) && std::abs(pv[k]) > pzero) any = true;
    }
    if (!any) {
      sol.degenerate_lines.push_back(line);
      for (int k = 0; k < n; ++k) {
        auto [i, j] = node(line, k);
        sol.blowup_cells(i, j) = true;
      }
      continue;
    }
    // Split the line at zeros and sign changes of p.
    auto usable = [&](int k) { return std::isfinite(pv[k]) && std::abs(pv[k]) > pzero; };
    int k = 0;
    while (k < n) {
      if (!usable(k)) {
        auto [i, j] = node(line, k);
        sol.blowup_cells(i, j) = true;
        ++k;
        continue;
      }
      int hi = k;
      while (hi + 1 < n && usable(hi + 1) && (pv[hi + 1] > 0) == (pv[k] > 0)) ++hi;
      const int lo = k;
      int start;
      if (lo == 0 && hi == n - 1)
        start = std::abs(pv[0]) >= std::abs(pv[n - 1]) ? 0 : n - 1;
      else if (lo == 0)
        start = 0;
      else if (hi == n - 1)
        start = n - 1;
      else
        start = static_cast<int>(std::max_element(pv.begin() + lo, pv.begin() + hi + 1,
                                                  [](double a, double b) { return std::abs(a) < std::abs(b); }) -
                                 pv.begin());
      double N0 = nan;
      try {
        N0 = initial_value(lp, s_of(start), spec.C);
      } catch (const DomainError&) {
      }
      auto store = [&](int kk, double v, bool ok) {
        auto [i, j] = node(line, kk);
        if (ok) {
          sol.grid(i, j) = v;
        } else {
          sol.blowup_cells(i, j) = true;
        }
      };
      const bool start_ok = std::isfinite(N0) && std::abs(N0) <= kBlowup;
      store(start, N0, start_ok);
      for (int dir : {1, -1}) {
        double N = N0;
        double h = 0.25 * ds;
        bool ok = start_ok;
        for (int kk = start + dir; kk >= lo && kk <= hi; kk += dir) {
          if (ok) {
            try {
              ok = advance(lp, s_of(kk - dir), s_of(kk), N, h);
            } catch (const DomainError&) {
              ok = false;
            }
          }
          store(kk, N, ok);
        }
      }
      k = hi + 1;
    }
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Positive definiteness

namespace {

bool pd2(double m11, double m12, double m21, double m22) {
  const double off = m12 + m21;
  return m11 > 0 && m22 > 0 && off * off < 4.0 * m11 * m22;
}

}  // namespace

GridMask positive_definite_mask(const Matrix2Field& N, const Grid2& window, const ParamMap& params) {
  window.validate();
  std::array<CompiledExpr, 4> c{CompiledExpr(N.a[0], params), CompiledExpr(N.a[1], params),
                                CompiledExpr(N.a[2], params), CompiledExpr(N.a[3], params)};
  GridMask mask(window.nx, window.ny);
  for (int i = 0; i < window.nx; ++i)
    for (int j = 0; j < window.ny; ++j) {
      const Point2 x = window.point(i, j);
      mask(i, j) = pd2(safe_eval(c[0], x), safe_eval(c[1], x), safe_eval(c[2], x), safe_eval(c[3], x));
    }
  return mask;
}

DefinitenessMasks positive_definite_mask(const NSolution& sol, const AnsatzSpec& spec, const ParamMap& params) {
  const Grid2& w = sol.window;
  const bool upper = spec.kind == AnsatzKind::Upper;
  const CompiledExpr diag(upper ? spec.a : spec.d, params);
  const double fixed = upper ? spec.b : spec.c;
  DefinitenessMasks out{GridMask(w.nx, w.ny), GridMask(w.nx, w.ny)};
  for (int i = 0; i < w.nx; ++i)
    for (int j = 0; j < w.ny; ++j) {
      const double v = safe_eval(diag, w.point(i, j));
      const double N = sol.grid(i, j);
      const bool finite = std::isfinite(N) && !sol.blowup_cells(i, j);
      out.quadratic(i, j) = finite && pd2(v, upper ? N : 0.0, upper ? 0.0 : N, fixed);
      out.entrywise(i, j) = finite && v > 0 && fixed > 0 && N > 0;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Exclusion regions

std::optional<int> ExclusionReport::containing_region(const std::vector<Point2>& points) const {
  std::optional<int> id;
  for (const auto& p : points) {
    if (!window.contains(p)) return std::nullopt;
    const Eigen::Vector2i k = window.nearest(p);
    const int l = labels(k.x(), k.y());
    if (l < 0 || (id && *id != l)) return std::nullopt;
    id = l;
  }
  return id;
}

namespace {

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// True when the complement of the region (inside its padded bounding box)
// is a single 8-connected piece, i.e. the region has no holes.
bool without_holes(const Eigen::ArrayXXi& labels, int id, int i0, int i1, int j0, int j1) {
  const int w = i1 - i0 + 3, h = j1 - j0 + 3;
  auto inside = [&](int a, int b) {
    const int i = a + i0 - 1, j = b + j0 - 1;
    return i >= 0 && j >= 0 && i < labels.rows() && j < labels.cols() && labels(i, j) == id;
  };
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  std::deque<std::pair<int, int>> queue{{0, 0}};
  seen[0] = 1;
  std::size_t reached = 1, total = 0;
  for (int a = 0; a < w; ++a)
    for (int b = 0; b < h; ++b) total += inside(a, b) ? 0 : 1;
  while (!queue.empty()) {
    auto [a, b] = queue.front();
    queue.pop_front();
    for (int da = -1; da <= 1; ++da)
      for (int db = -1; db <= 1; ++db) {
        const int na = a + da, nb = b + db;
        if (na < 0 || nb < 0 || na >= w || nb >= h) continue;
        auto& s = seen[static_cast<std::size_t>(na) * h + nb];
        if (s || inside(na, nb)) continue;
        s = 1;
        ++reached;
        queue.emplace_back(na, nb);
      }
  }
  return reached == total;
}

}  // namespace

ExclusionReport exclusion_report(const VectorField2& u, const AnsatzSpec& spec, const Grid2& window,
                                 const ParamMap& params) {
  ExclusionReport rep;
  rep.window = window;
  rep.kind = spec.kind;
  rep.solution = solve_N(u, spec, window, params);
  const NSolution& sol = rep.solution;
  rep.curves = sol.singular_curves;
  const DefinitenessMasks masks = positive_definite_mask(sol, spec, params);
  rep.pd = masks.quadratic;
  rep.entrywise = masks.entrywise;
  rep.exists = GridMask(window.nx, window.ny);
  for (int i = 0; i < window.nx; ++i)
    for (int j = 0; j < window.ny; ++j) rep.exists(i, j) = std::isfinite(sol.grid(i, j)) && !sol.blowup_cells(i, j);

  // Cut functions: every curve, then p itself.
  std::vector<GridArray> cut;
  std::vector<Expr> fns = rep.curves;
  fns.push_back(sol.ode.p);
  for (const auto& f : fns) {
    const CompiledExpr c(f, params);
    GridArray v(window.nx, window.ny);
    for (int i = 0; i < window.nx; ++i)
      for (int j = 0; j < window.ny; ++j) v(i, j) = safe_eval(c, window.point(i, j));
    cut.push_back(std::move(v));
  }
  auto node_ok = [&](int i, int j) {
    if (!rep.exists(i, j) || !rep.pd(i, j)) return false;
    for (const auto& v : cut)
      if (!std::isfinite(v(i, j)) || v(i, j) == 0.0) return false;
    return true;
  };
  auto crossed = [&](std::size_t k, int i, int j, int a, int b) {
    const int s1 = sign_of(cut[k](i, j)), s2 = sign_of(cut[k](a, b));
    return s1 == 0 || s2 == 0 || s1 != s2;
  };

  rep.labels = Eigen::ArrayXXi::Constant(window.nx, window.ny, -1);
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  int holes = 0;
  for (int i0 = 0; i0 < window.nx; ++i0) {
    for (int j0 = 0; j0 < window.ny; ++j0) {
      if (rep.labels(i0, j0) >= 0 || !node_ok(i0, j0)) continue;
      ExclusionRegion reg;
      reg.id = static_cast<int>(rep.regions.size());
      std::set<int> bounding;
      int imin = i0, imax = i0, jmin = j0, jmax = j0;
      std::deque<std::pair<int, int>> queue{{i0, j0}};
      rep.labels(i0, j0) = reg.id;
      while (!queue.empty()) {
        auto [i, j] = queue.front();
        queue.pop_front();
        ++reg.cells;
        imin = std::min(imin, i), imax = std::max(imax, i), jmin = std::min(jmin, j), jmax = std::max(jmax, j);
        for (int d = 0; d < 4; ++d) {
          const int a = i + di[d], b = j + dj[d];
          if (a < 0 || b < 0 || a >= window.nx || b >= window.ny) {
            reg.touches_window = true;
            continue;
          }
          bool cut_here = false;
          for (std::size_t k = 0; k < cut.size(); ++k) {
            if (!crossed(k, i, j, a, b)) continue;
            cut_here = true;
            if (k < rep.curves.size()) bounding.insert(static_cast<int>(k));
          }
          if (cut_here) continue;
          if (!node_ok(a, b)) {
            if (rep.exists(a, b) && !rep.pd(a, b)) reg.bounded_by_pd = true;
            continue;
          }
          if (rep.labels(a, b) >= 0) continue;
          rep.labels(a, b) = reg.id;
          queue.emplace_back(a, b);
        }
      }
      reg.x1_min = window.x1(imin), reg.x1_max = window.x1(imax);
      reg.x2_min = window.x2(jmin), reg.x2_max = window.x2(jmax);
      reg.bounding_curves.assign(bounding.begin(), bounding.end());
      reg.simply_connected = without_holes(rep.labels, reg.id, imin, imax, jmin, jmax);
      if (!reg.simply_connected) ++holes;
      rep.regions.push_back(std::move(reg));
    }
  }

  std::ostringstream notes;
  notes << "integration constant C = " << spec.C << "; ";
  notes << "positive definiteness uses the symmetric part of N";
  if (!sol.closed_form) notes << "; no closed form, grid-line RK4 only";
  if (!sol.degenerate_lines.empty())
    notes << "; " << sol.degenerate_lines.size() << " grid line(s) where the ODE degenerates were dropped";
  if (holes > 0) notes << "; " << holes << " region(s) enclose holes and are not simply connected";
  rep.caveats = notes.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Closed-orbit oracle

ClosedOrbitReport find_closed_orbit(const VectorField2& u_in, const Point2& seed, const OrbitSearchOptions& opts,
                                    const ParamMap& params) {
  const VectorField2 u = u_in.bound(params);
  if (!u.autonomous()) throw std::invalid_argument("find_closed_orbit: the field must be autonomous");
  const CompiledField2 field(u);
  auto f = [&](const Point2& x, double) -> Point2 { return field(x); };
  const AdaptiveOptions aopts{opts.local_tol, opts.h_max, 1e-12};

  Point2 x = seed;
  double t = 0.0, h = opts.h_max;
  while (opts.settle - t > 1e-12) {
    h = std::min(h, opts.settle - t);
    adaptive_step(f, x, t, h, aopts);
    if (!x.allFinite()) throw NoClosureWithinTmax("trajectory diverged while settling");
  }
  h = opts.h_max;

  const double t_end = opts.settle + opts.tmax;
  Point2 anchor = x;
  Vector2 normal = field(anchor);
  if (normal.norm() < 1e-12) throw NoClosureWithinTmax("the seed settles on an equilibrium");
  double t_anchor = t;
  ClosedOrbitReport rep;
  rep.seed = seed;
  rep.t = {t};
  rep.orbit = {x};
  auto g = [&](const Point2& y) { return normal.dot(y - anchor); };

  while (t < t_end) {
    const Point2 x_prev = x;
    const double t_prev = t;
    const double taken = adaptive_step(f, x, t, h, aopts);
    if (!x.allFinite()) throw NoClosureWithinTmax("trajectory diverged");
    const double g0 = g(x_prev), g1 = g(x);
    if (g0 < 0 && g1 >= 0 && field(x).dot(normal) > 0) {
      auto at = [&](double d) { return rk4_step(f, x_prev, t_prev, d); };
      double delta = taken;
      if (g1 > 0) {
        boost::uintmax_t iters = 100;
        auto r = boost::math::tools::toms748_solve([&](double d) { return g(at(d)); }, 0.0, taken, g0, g1,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
        delta = 0.5 * (r.first + r.second);
      }
      const Point2 xc = delta == taken ? x : at(delta);
      const double tc = t_prev + delta;
      const double gap = (xc - anchor).norm();
      if (gap < opts.tol) {
        rep.t.push_back(tc);
        rep.orbit.push_back(xc);
        rep.period = tc - t_anchor;
        rep.closure = gap;
        for (const auto& p : rep.orbit) rep.velocity.push_back(field(p));
        for (auto& s : rep.t) s -= t_anchor;
        return rep;
      }
      anchor = xc;
      normal = field(xc);
      t_anchor = tc;
      x = xc;
      t = tc;
      rep.t = {tc};
      rep.orbit = {xc};
      continue;
    }
    rep.t.push_back(t);
    rep.orbit.push_back(x);
  }
  throw NoClosureWithinTmax("no recurrence within " + std::to_string(opts.tol) + " before t = " +
                            std::to_string(t_end));
}

std::vector<OrbitSearchResult> find_closed_orbits(const VectorField2& u, const std::vector<Point2>& seeds,
                                                  const OrbitSearchOptions& opts, const ParamMap& params) {
  std::vector<OrbitSearchResult> out;
  for (const auto& s : seeds) {
    OrbitSearchResult r;
    r.seed = s;
    try {
      r.orbit = find_closed_orbit(u, s, opts, params);
    } catch (const NoClosureWithinTmax& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<int> verify_crossings(const ClosedOrbitReport& orbit, const std::vector<Expr>& curves,
                                  const ParamMap& params) {
  std::vector<int> counts;
  const std::size_t n = orbit.orbit.size() > 1 ? orbit.orbit.size() - 1 : orbit.orbit.size();
  for (const auto& c : curves) {
    const CompiledExpr f(c, params);
    std::vector<int> signs;
    for (std::size_t k = 0; k < n; ++k) {
      const int s = sign_of(safe_eval(f, orbit.orbit[k]));
      if (s != 0) signs.push_back(s);
    }
    int count = 0;
    for (std::size_t k = 0; k < signs.size(); ++k)
      if (signs[k] != signs[(k + 1) % signs.size()]) ++count;
    counts.push_back(count);
  }
  return counts;
}

double loop_integral(const ClosedOrbitReport& orbit, const Matrix2Field& N, const ParamMap& params) {
  if (orbit.velocity.size() != orbit.orbit.size())
    throw std::invalid_argument("loop_integral: orbit has no velocity samples");
  std::array<CompiledExpr, 4> c{CompiledExpr(N.a[0], params), CompiledExpr(N.a[1], params),
                                CompiledExpr(N.a[2], params), CompiledExpr(N.a[3], params)};
  auto flux = [&](std::size_t k) {
    const Point2& x = orbit.orbit[k];
    Matrix2d m;
    m << c[0](x), c[1](x), c[2](x), c[3](x);
    return Vector2(m * orbit.velocity[k]);
  };
  double sum = 0.0;
  Vector2 prev = flux(0);
  for (std::size_t k = 1; k < orbit.orbit.size(); ++k) {
    const Vector2 next = flux(k);
    sum += 0.5 * (prev + next).dot(orbit.orbit[k] - orbit.orbit[k - 1]);
    prev = next;
  }
  return sum;
}

std::vector<NamedPolyline> curve_polylines(const std::vector<Expr>& curves, const Grid2& window,
                                           const ParamMap& params) {
  Grid2 fine = window;
  fine.nx = std::max(window.nx, 256);
  fine.ny = std::max(window.ny, 256);
  std::vector<NamedPolyline> out;
  for (const auto& c : curves) {
    const CompiledExpr f(c, params);
    GridArray v(fine.nx, fine.ny);
    for (int i = 0; i < fine.nx; ++i)
      for (int j = 0; j < fine.ny; ++j) v(i, j) = safe_eval(f, fine.point(i, j));
    for (auto& line : contour_lines(v, fine, 0.0)) out.push_back({to_string(c), std::move(line)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

json grid_json(const Grid2& g) {
  return {{"x1_min", g.x1_min}, {"x1_max", g.x1_max}, {"nx", g.nx},
          {"x2_min", g.x2_min}, {"x2_max", g.x2_max}, {"ny", g.ny}};
}

json curve_list(const std::vector<Expr>& curves) {
  json a = json::array();
  for (const auto& c : curves) a.push_back(to_string(c) + " = 0");
  return a;
}

std::size_t count(const GridMask& m) { return static_cast<std::size_t>(m.count()); }

json solution_json(const NSolution& s) {
  json j = {{"entry", s.which == AnsatzKind::Upper ? "N12" : "N21"},
            {"ansatz", to_string(s.which)},
            {"variable", std::string(var_name(s.ode.s))},
            {"ode",
             {{"p", to_string(simplify(s.ode.p))},
              {"q", to_string(simplify(s.ode.q))},
              {"r", to_string(simplify(s.ode.r))}}},
            {"C", s.C},
            {"closed_form", s.closed_form ? json(to_string(*s.closed_form)) : json(nullptr)},
            {"singular_curves", curve_list(s.singular_curves)},
            {"window", grid_json(s.window)},
            {"blowup_cells", count(s.blowup_cells)},
            {"degenerate_lines", s.degenerate_lines}};
  return j;
}

json orbit_json(const ClosedOrbitReport& r) {
  json pts = json::array();
  for (const auto& p : r.orbit) pts.push_back({p.x(), p.y()});
  return {{"seed", {r.seed.x(), r.seed.y()}}, {"period", r.period},   {"closure", r.closure},
          {"crossings", r.crossings},           {"points", pts.size()}, {"orbit", pts}};
}

}  // namespace

std::string to_json(const NSolution& s) { return solution_json(s).dump(2); }

std::string to_json(const ExclusionReport& r) {
  json regions = json::array();
  for (const auto& g : r.regions) {
    json bounding = json::array();
    for (int k : g.bounding_curves) bounding.push_back(to_string(r.curves[k]) + " = 0");
    regions.push_back({{"id", g.id},
                       {"cells", g.cells},
                       {"x1", {g.x1_min, g.x1_max}},
                       {"x2", {g.x2_min, g.x2_max}},
                       {"bounded_by", bounding},
                       {"bounded_by_pd", g.bounded_by_pd},
                       {"touches_window", g.touches_window},
                       {"simply_connected", g.simply_connected}});
  }
  json j = {{"ansatz", to_string(r.kind)},
            {"window", grid_json(r.window)},
            {"curves", curve_list(r.curves)},
            {"regions", regions},
            {"cells", {{"exists", count(r.exists)}, {"pd", count(r.pd)}, {"entrywise", count(r.entrywise)}}},
            {"solution", solution_json(r.solution)},
            {"caveats", r.caveats}};
  return j.dump(2);
}

std::string to_json(const ClosedOrbitReport& r) { return orbit_json(r).dump(2); }

std::string to_json(const std::vector<OrbitSearchResult>& results) {
  json a = json::array();
  for (const auto& r : results) {
    if (r.orbit) {
      json j = orbit_json(*r.orbit);
      j["closed"] = true;
      a.push_back(std::move(j));
    } else {
      a.push_back({{"seed", {r.seed.x(), r.seed.y()}}, {"closed", false}, {"error", r.error}});
    }
  }
  return a.dump(2);
}

}  // namespace planar
