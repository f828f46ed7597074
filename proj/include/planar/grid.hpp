// Rectangular sampling grids over the (x1, x2) plane.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace planar {

using Point2 = Eigen::Vector2d;

/// Node-centred rectangular grid: nx nodes on [x1_min, x1_max] and ny nodes on
/// [x2_min, x2_max], endpoints included. Values on a grid are stored in an
/// nx-by-ny Eigen array indexed (i, j) -> (x1_i, x2_j).
struct Grid2 {
  double x1_min = -1.0;
  double x1_max = 1.0;
  int nx = 16;
  double x2_min = -1.0;
  double x2_max = 1.0;
  int ny = 16;

  static Grid2 square(double lo, double hi, int n) { return {lo, hi, n, lo, hi, n}; }

  void validate() const {
    if (!(x1_max > x1_min) || !(x2_max > x2_min))
      throw std::invalid_argument("Grid2: window bounds must be ordered");
    if (nx < 2 || ny < 2) throw std::invalid_argument("Grid2: need at least 2 nodes per axis");
  }

  double dx1() const { return (x1_max - x1_min) / (nx - 1); }
  double dx2() const { return (x2_max - x2_min) / (ny - 1); }
  double x1(int i) const { return i == nx - 1 ? x1_max : x1_min + i * dx1(); }
  double x2(int j) const { return j == ny - 1 ? x2_max : x2_min + j * dx2(); }
  Point2 point(int i, int j) const { return {x1(i), x2(j)}; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  bool contains(const Point2& p) const {
    return p.x() >= x1_min && p.x() <= x1_max && p.y() >= x2_min && p.y() <= x2_max;
  }

  /// Nearest node to p, clamped to the grid.
  Eigen::Vector2i nearest(const Point2& p) const {
    auto clamp = [](long v, int n) { return static_cast<int>(v < 0 ? 0 : (v >= n ? n - 1 : v)); };
    return {clamp(std::lround((p.x() - x1_min) / dx1()), nx),
            clamp(std::lround((p.y() - x2_min) / dx2()), ny)};
  }
};

using GridArray = Eigen::ArrayXXd;
using GridMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace planar
