#include "planar/errors.hpp"
#include "planar/expr.hpp"

#include <cmath>

namespace planar {

ZeroTest is_identically_zero(const Expr& e, const Grid2& probe, const ZeroTestOptions& opts) {
  probe.validate();
  if (probe.nx < 16 || probe.ny < 16) throw std::invalid_argument("is_identically_zero: probe needs at least 16x16 points");

  ZeroTest out;
  const Expr s = simplify(opts.params ? bind(e, *opts.params) : e);
  if (s.is_constant(0.0)) {
    out.zero = true;
    return out;
  }

  out.mode = ZeroMode::Numeric;
  static const ParamMap kNoParams;
  const CompiledExpr f(e, opts.params ? *opts.params : kNoParams);
  const std::vector<double> times = depends_on(s, Var::T) ? opts.times : std::vector<double>{0.0};

  bool within = true;
  for (double t : times) {
    for (int i = 0; i < probe.nx; ++i) {
      for (int j = 0; j < probe.ny; ++j) {
        const Point2 p = probe.point(i, j);
        ++out.probe_points;
        double v = 0.0;
        try {
          v = std::fabs(f(p, t));
        } catch (const DomainError&) {
          continue;
        }
        ++out.defined_points;
        out.max_abs = std::max(out.max_abs, v);
        const double bound = opts.tol * (opts.scale ? opts.scale(p, t) : 1.0);
        if (!(v <= bound)) within = false;
      }
    }
  }
  if (out.defined_points == 0) throw DomainError("expression is undefined at every probe point");
  out.zero = within;
  return out;
}

}  // namespace planar
