#include "planar/hamiltonian.hpp"

#include "normal_form.hpp"
#include "planar/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace planar {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Hamiltonian:
      return "Hamiltonian";
    case Verdict::NotHamiltonian:
      return "NotHamiltonian";
    default:
      return "Inconclusive";
  }
}

namespace {

bool spatial(const Expr& e) { return depends_on(e, Var::X1) || depends_on(e, Var::X2); }
bool spatial(const detail::Atom& a) { return depends_on(a, Var::X1) || depends_on(a, Var::X2); }
bool never_zero(const detail::Atom& a) { return a.kind == detail::AtomKind::Function && a.func == Op::Exp; }

void add_locus(std::vector<SingularLocus>& out, Expr curve, bool pole) {
  curve = simplify(curve);
  for (auto& l : out)
    if (l.curve == curve) {
      l.pole = l.pole || pole;
      return;
    }
  out.push_back({std::move(curve), pole, false});
}

bool crosses_window(const Expr& curve, const Grid2& w, const ParamMap& params) {
  Grid2 g = w;
  g.nx = std::max(g.nx, 64);
  g.ny = std::max(g.ny, 64);
  const CompiledExpr f(curve, params);
  Eigen::ArrayXXd v = Eigen::ArrayXXd::Constant(g.nx, g.ny, std::nan(""));
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      try {
        v(i, j) = f(g.point(i, j));
      } catch (const DomainError&) {
      }
      if (v(i, j) == 0.0) return true;
    }
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      if (i + 1 < g.nx && v(i, j) * v(i + 1, j) < 0) return true;
      if (j + 1 < g.ny && v(i, j) * v(i, j + 1) < 0) return true;
    }
  return false;
}

}  // namespace

SingularSet singular_loci(const Expr& alpha, const Grid2& window, const ParamMap& params) {
  using namespace detail;
  window.validate();
  SingularSet out;
  out.window = window;
  const Expr a = bind(alpha, params);
  const Sum s = normalize(a);

  // Denominators: the most negative constant power of each atom over all
  // terms. Atoms under a symbolic exponent are reported as they stand.
  std::vector<std::pair<Atom, Rational>> poles;
  for (const auto& [m, c] : s.terms) {
    for (const Factor& f : m.factors) {
      if (!spatial(f.atom) || never_zero(f.atom)) continue;
      Rational k;
      if (!constant_value(*f.exponent, k)) {
        add_locus(out.curves, to_expr(f.atom), true);
        continue;
      }
      if (k >= 0) continue;
      auto it = std::find_if(poles.begin(), poles.end(), [&](const auto& p) { return compare(p.first, f.atom) == 0; });
      if (it == poles.end())
        poles.emplace_back(f.atom, -k);
      else
        it->second = std::max(it->second, Rational(-k));
    }
  }
  Sum numerator = s;
  for (const auto& [atom, k] : poles) {
    add_locus(out.curves, to_expr(atom), true);
    numerator = mul(numerator, atom_power(atom, constant_sum(k)));
  }
  if (numerator.terms.size() == 1) {
    for (const Factor& f : numerator.terms.begin()->first.factors) {
      Rational k;
      if (spatial(f.atom) && !never_zero(f.atom) && constant_value(*f.exponent, k) && k > 0)
        add_locus(out.curves, to_expr(f.atom), false);
    }
  } else if (numerator.terms.size() > 1) {
    const Expr n = to_expr(numerator);
    if (spatial(n)) add_locus(out.curves, n, false);
  }

  for (auto& l : out.curves) {
    try {
      l.in_window = crosses_window(l.curve, window, params);
    } catch (const UnknownIdentifier&) {
      l.in_window = false;
    }
  }

  out.cells = GridMask::Constant(window.nx, window.ny, false);
  try {
    const CompiledExpr f(a, params);
    for (int i = 0; i < window.nx; ++i)
      for (int j = 0; j < window.ny; ++j) {
        try {
          const double v = std::fabs(f(window.point(i, j)));
          out.cells(i, j) = v > 1e12 || v < 1e-12;
        } catch (const DomainError&) {
          out.cells(i, j) = true;
        }
      }
  } catch (const UnknownIdentifier&) {
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

CriterionReport criterion(const VectorField2& F, const Expr& alpha, const Grid2& probe, const CriterionOptions& opts,
                          bool require_positive) {
  probe.validate();
  CriterionReport r;
  r.alpha = alpha;
  const Expr a = bind(alpha, opts.params);
  const VectorField2 Fb = F.bound(opts.params);
  const VectorField2 aF{simplify(a * Fb.u1), simplify(a * Fb.u2)};
  r.divergence = simplify(differentiate(aF.u1, Var::X1) + differentiate(aF.u2, Var::X2));
  r.singular = singular_loci(alpha, probe, opts.params);

  const bool numeric = parameters_of(a).empty() && parameters_of(aF.u1).empty() && parameters_of(aF.u2).empty();
  if (numeric) {
    const CompiledExpr ca(a);
    std::size_t defined = 0;
    bool positive = true;
    for (int i = 0; i < probe.nx; ++i)
      for (int j = 0; j < probe.ny; ++j) {
        try {
          const double v = ca(probe.point(i, j));
          ++defined;
          if (require_positive ? !(v > 0.0) : v == 0.0) positive = false;
        } catch (const DomainError&) {
        }
      }
    if (defined == 0) throw DomainError("alpha is undefined on the whole probe");
    if (!positive) {
      r.verdict = Verdict::Inconclusive;
      r.note = require_positive ? "alpha is not positive on the probe" : "1/det B vanishes on the probe";
      return r;
    }
  } else {
    r.note = "unbound parameters: positivity of alpha not sampled";
  }

  ZeroTestOptions zo;
  zo.tol = opts.tol;
  zo.times = opts.times;
  zo.params = &opts.params;
  if (numeric) {
    const auto field = std::make_shared<CompiledField2>(aF);
    zo.scale = [field](const Point2& p, double t) {
      try {
        return 1.0 + (*field)(p, t).norm();
      } catch (const DomainError&) {
        return 1.0;
      }
    };
  }
  const ZeroTest z = is_identically_zero(r.divergence, probe, zo);
  r.mode = z.mode;
  r.verdict = z.zero ? Verdict::Hamiltonian : Verdict::NotHamiltonian;
  r.residual = z.max_abs;
  if (numeric && z.mode == ZeroMode::Symbolic) r.residual = 0.0;
  return r;
}

}  // namespace

CriterionReport check_criterion_I(const VectorField2& F, const Expr& alpha, const Grid2& probe,
                                  const CriterionOptions& opts) {
  return criterion(F, alpha, probe, opts, true);
}

CriterionReport check_criterion_II(const VectorField2& F, const Matrix2Field& B, const Grid2& probe,
                                   const CriterionOptions& opts) {
  probe.validate();
  const Expr det = B.determinant();
  const CompiledExpr d(bind(det, opts.params));
  for (int i = 0; i < probe.nx; ++i)
    for (int j = 0; j < probe.ny; ++j) {
      double v;
      try {
        v = d(probe.point(i, j));
      } catch (const DomainError&) {
        continue;
      }
      if (std::fabs(v) < 1e-14) throw SingularDiffusion("det B vanishes on the probe");
    }
  CriterionReport r = criterion(F, simplify(Expr(1.0) / det), probe, opts, false);
  if (r.note.empty()) r.note = "alpha = 1/det B";
  return r;
}

std::optional<Expr> find_monomial_alpha(const VectorField2& F, const Grid2& probe, int max_degree,
                                        const CriterionOptions& opts) {
  for (int total = 0; total <= 2 * max_degree; ++total)
    for (int i = -max_degree; i <= max_degree; ++i) {
      const int rest = total - std::abs(i);
      if (rest < 0 || rest > max_degree) continue;
      for (int j : {rest, -rest}) {
        const Expr alpha = simplify(pow(sym::x1, Expr(static_cast<double>(i))) * pow(sym::x2, Expr(static_cast<double>(j))));
        try {
          if (check_criterion_I(F, alpha, probe, opts).verdict == Verdict::Hamiltonian) return alpha;
        } catch (const DomainError&) {
        }
        if (rest == 0) break;
      }
    }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

// Fixed panel count, so the result is a smooth function of the endpoints.
double simpson(const auto& f, double lo, double hi, int n) {
  if (lo == hi) return 0.0;
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int k = 1; k < n; ++k) s += (k & 1 ? 4.0 : 2.0) * f(lo + k * h);
  return s * h / 3.0;
}

int panels(const Grid2& g) {
  const double span = std::max(g.x1_max - g.x1_min, g.x2_max - g.x2_min);
  const int n = static_cast<int>(std::ceil(4.0 * span / std::min(g.dx1(), g.dx2())));
  return std::max(64, n + (n & 1));
}

}  // namespace

double HamiltonianRecovery::operator()(const Point2& x, double t) const {
  if (Htilde) return evaluate(*Htilde, x, t, params);
  const CompiledField2 g(gradient_, params);
  const int n = panels(region);
  const double b2 = basepoint.y();
  return simpson([&](double s) { return g(Point2(s, b2), t).x(); }, basepoint.x(), x.x(), n) +
         simpson([&](double s) { return g(Point2(x.x(), s), t).y(); }, b2, x.y(), n);
}

HamiltonianRecovery recover_hamiltonian(const VectorField2& F, const Expr& alpha, const Point2& basepoint,
                                        const Grid2& region, const ParamMap& params) {
  region.validate();
  if (!region.contains(basepoint)) throw std::invalid_argument("recover_hamiltonian: basepoint outside the region");
  const Expr a = bind(alpha, params);
  const VectorField2 Fb = F.bound(params);

  // alpha must stay finite and nonzero on the region and along the first leg.
  {
    const CompiledExpr ca(a, params);
    auto check = [&](const Point2& p) {
      double v;
      try {
        v = ca(p);
      } catch (const DomainError&) {
        throw PathCrossesSingularity("alpha is undefined on the integration region");
      }
      if (!(std::fabs(v) > 1e-12 && std::fabs(v) < 1e12))
        throw PathCrossesSingularity("alpha degenerates on the integration region");
    };
    for (int i = 0; i < region.nx; ++i) {
      for (int j = 0; j < region.ny; ++j) check(region.point(i, j));
      check(Point2(region.x1(i), basepoint.y()));
    }
  }

  Grid2 probe = region;
  probe.nx = std::max(probe.nx, 16);
  probe.ny = std::max(probe.ny, 16);
  CriterionOptions co;
  co.params = params;
  if (check_criterion_I(Fb, a, probe, co).verdict == Verdict::NotHamiltonian)
    throw NotClosedForm("alpha F is not a closed form on the region");

  HamiltonianRecovery r;
  r.region = region;
  r.basepoint = basepoint;
  r.alpha = alpha;
  r.inv_sqrt_detg = simplify(Expr(1.0) / alpha);
  r.params = params;
  r.gradient_ = {simplify(-a * Fb.u2), simplify(a * Fb.u1)};

  const Expr b1(basepoint.x()), b2(basepoint.y());
  try {
    const Expr G1 = antiderivative(substitute(r.gradient_.u1, {{Var::X2, b2}}), Var::X1);
    const Expr G2 = antiderivative(r.gradient_.u2, Var::X2);
    r.Htilde = simplify(G1 - substitute(G1, {{Var::X1, b1}}) + G2 - substitute(G2, {{Var::X2, b2}}));
  } catch (const NoAntiderivative&) {
  }

  r.grid = GridArray(region.nx, region.ny);
  for (int i = 0; i < region.nx; ++i)
    for (int j = 0; j < region.ny; ++j) r.grid(i, j) = r(region.point(i, j));

  const CompiledField2 g(r.gradient_, params);
  if (r.Htilde) {
    const CompiledField2 grad(gradient(*r.Htilde), params);
    for (int i = 0; i < region.nx; ++i)
      for (int j = 0; j < region.ny; ++j) {
        const Point2 p = region.point(i, j);
        const Vector2 want = g(p);
        r.residual = std::max(r.residual, (grad(p) - want).cwiseAbs().maxCoeff() / (1.0 + want.cwiseAbs().maxCoeff()));
      }
  } else {
    // Central differences of the quadrature itself on a subsample of nodes.
    const double d1 = 1e-4 * region.dx1(), d2 = 1e-4 * region.dx2();
    const int si = std::max(1, region.nx / 16), sj = std::max(1, region.ny / 16);
    for (int i = 1; i + 1 < region.nx; i += si)
      for (int j = 1; j + 1 < region.ny; j += sj) {
        const Point2 p = region.point(i, j);
        const Vector2 dH((r(p + Point2(d1, 0)) - r(p - Point2(d1, 0))) / (2 * d1),
                         (r(p + Point2(0, d2)) - r(p - Point2(0, d2))) / (2 * d2));
        const Vector2 want = g(p);
        r.residual = std::max(r.residual, (dH - want).cwiseAbs().maxCoeff() / (1.0 + want.cwiseAbs().maxCoeff()));
      }
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json grid_json(const Grid2& g) {
  return {{"x1_min", g.x1_min}, {"x1_max", g.x1_max}, {"nx", g.nx},
          {"x2_min", g.x2_min}, {"x2_max", g.x2_max}, {"ny", g.ny}};
}

}  // namespace

std::string to_json(const CriterionReport& r) {
  nlohmann::json loci = nlohmann::json::array();
  for (const auto& l : r.singular.curves)
    loci.push_back({{"curve", to_string(l.curve) + " = 0"}, {"pole", l.pole}, {"in_window", l.in_window}});
  nlohmann::json j{{"verdict", to_string(r.verdict)},
                   {"mode", r.mode == ZeroMode::Symbolic ? "symbolic" : "numeric"},
                   {"residual", r.residual},
                   {"alpha", to_string(r.alpha)},
                   {"divergence", to_string(r.divergence)},
                   {"singular_loci", loci},
                   {"singular_nodes", r.singular.cells.count()},
                   {"window", grid_json(r.singular.window)},
                   {"note", r.note}};
  return j.dump(2);
}

std::string to_json(const HamiltonianRecovery& r) {
  nlohmann::json j{{"Htilde", r.Htilde ? nlohmann::json(to_string(*r.Htilde)) : nlohmann::json(nullptr)},
                   {"basepoint", {r.basepoint.x(), r.basepoint.y()}},
                   {"alpha", to_string(r.alpha)},
                   {"inv_sqrt_detg", to_string(r.inv_sqrt_detg)},
                   {"residual", r.residual},
                   {"region", grid_json(r.region)}};
  return j.dump(2);
}

}  // namespace planar
