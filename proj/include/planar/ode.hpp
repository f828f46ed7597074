// Fixed-step and step-doubling RK4 for planar fields.
#pragma once

#include "planar/grid.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace planar {

struct Trajectory {
  std::vector<double> t;
  std::vector<Point2> x;
};

template <typename Field>
Point2 rk4_step(const Field& f, const Point2& x, double t, double h) {
  const Point2 k1 = f(x, t);
  const Point2 k2 = f(x + 0.5 * h * k1, t + 0.5 * h);
  const Point2 k3 = f(x + 0.5 * h * k2, t + 0.5 * h);
  const Point2 k4 = f(x + h * k3, t + h);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Classical RK4 from t0 to t1; the last step is shortened to land on t1.
/// Stores every `stride`-th state plus the endpoint.
template <typename Field>
Trajectory integrate_rk4(const Field& f, Point2 x, double t0, double t1, double dt, int stride = 1) {
  Trajectory out;
  out.t.push_back(t0);
  out.x.push_back(x);
  const auto steps = static_cast<long long>(std::ceil((t1 - t0) / dt - 1e-9));
  double t = t0;
  for (long long k = 1; k <= steps; ++k) {
    const double next = k == steps ? t1 : t0 + static_cast<double>(k) * dt;
    x = rk4_step(f, x, t, next - t);
    t = next;
    if (k % stride == 0 || k == steps) {
      out.t.push_back(t);
      out.x.push_back(x);
    }
  }
  return out;
}

struct AdaptiveOptions {
  double tol = 1e-9;  // local error per step
  double h_max = 1e-2;
  double h_min = 1e-12;
};

/// One accepted step-doubling RK4 step. Advances (x, t), updates h to the
/// next suggested size and returns the size actually taken.
template <typename Field>
double adaptive_step(const Field& f, Point2& x, double& t, double& h, const AdaptiveOptions& opts) {
  for (;;) {
    const Point2 full = rk4_step(f, x, t, h);
    const Point2 half = rk4_step(f, rk4_step(f, x, t, 0.5 * h), t + 0.5 * h, 0.5 * h);
    const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
    if (err <= opts.tol || h <= opts.h_min) {
      const double taken = h;
      x = half + (half - full) / 15.0;
      t += taken;
      const double grow = err > 0 ? 0.9 * std::pow(opts.tol / err, 0.2) : 2.0;
      h = std::min({opts.h_max, taken * std::clamp(grow, 0.2, 2.0)});
      return taken;
    }
    h = std::max(opts.h_min, h * std::max(0.2, 0.9 * std::pow(opts.tol / err, 0.2)));
  }
}

}  // namespace planar
