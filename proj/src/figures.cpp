#include "planar/figures.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace planar {

double fig2_value(double J, double K, const Point2& x) {
  const double h = std::pow(std::abs(std::sin(x.y())), J) / std::pow(std::abs(std::sin(x.x())), K);
  if (!std::isfinite(h) || h > 1.0) return -1.0;
  return -h;
}

Fig2Panel fig2_panel(double J, double K, int n, const std::vector<double>& levels) {
  constexpr double pi = std::numbers::pi;
  Fig2Panel p;
  p.J = J;
  p.K = K;
  p.grid = Grid2::square(-pi, pi, n);
  p.value.resize(n, n);
  p.clipped.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point2 x = p.grid.point(i, j);
      const double h = std::pow(std::abs(std::sin(x.y())), J) / std::pow(std::abs(std::sin(x.x())), K);
      p.clipped(i, j) = !std::isfinite(h) || h > 1.0;
      p.value(i, j) = fig2_value(J, K, x);
    }
  p.levels = levels;
  const double h = pi / 2;
  const std::vector<Point2> centres{{h, h}, {-h, h}, {h, -h}, {-h, -h}};
  for (double c : levels)
    if (has_closed_level(p.grid, p.value, p.clipped, c, centres)) p.closed_levels.push_back(c);
  return p;
}

namespace {

bool encloses(const std::vector<Point2>& poly, const Point2& q) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y() > q.y()) != (b.y() > q.y()) && q.x() < (b.x() - a.x()) * (q.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

}  // namespace

bool has_closed_level(const Grid2& grid, const GridArray& values, const GridMask& excluded, double level,
                      const std::vector<Point2>& centres) {
  GridArray v = values;
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      if (excluded(i, j)) v(i, j) = std::numeric_limits<double>::quiet_NaN();
  const double mx = grid.dx1(), my = grid.dx2();
  for (const Polyline& line : contour_lines(v, grid, level)) {
    if (!line.closed) continue;
    bool inside = true;
    for (const Point2& p : line.points)
      if (p.x() < grid.x1_min + mx || p.x() > grid.x1_max - mx || p.y() < grid.x2_min + my ||
          p.y() > grid.x2_max - my) {
        inside = false;
        break;
      }
    if (!inside) continue;
    for (const Point2& c : centres)
      if (encloses(line.points, c)) return true;
  }
  return false;
}

}  // namespace planar
