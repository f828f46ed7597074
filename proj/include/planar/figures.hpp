// Plot data for the coupled Kuramoto pair: -|H~| over the periodic square,
// with H~ = -|sin x2|^J / |sin x1|^K and x = (y, theta).
#pragma once

#include "planar/contour.hpp"
#include "planar/grid.hpp"

#include <vector>

namespace planar {

/// -|H~| clipped to [-1, 0]; undefined points are clipped to -1.
double fig2_value(double J, double K, const Point2& x);

struct Fig2Panel {
  double J = 1.0;
  double K = -1.0;
  Grid2 grid;
  GridArray value;
  GridMask clipped;  // |H~| > 1 or undefined
  std::vector<double> levels;
  std::vector<double> closed_levels;  // levels with at least one closed curve
};

/// n x n grid over [-pi, pi]^2.
Fig2Panel fig2_panel(double J, double K, int n, const std::vector<double>& levels);

/// A closed contour of `level` that never enters a cell with an excluded
/// corner, stays off the outer ring of cells and winds around one of
/// `centres`. Loops around no equilibrium are grid artefacts pinched off
/// near a singular line.
bool has_closed_level(const Grid2& grid, const GridArray& values, const GridMask& excluded, double level,
                      const std::vector<Point2>& centres);

}  // namespace planar
