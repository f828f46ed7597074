// Level curves of gridded scalars by marching squares.
#pragma once

#include "planar/grid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace planar {

struct Polyline {
  std::vector<Point2> points;
  bool closed = false;  // last point joins the first
};

/// Polylines of {values = level}. Cells with a non-finite corner are skipped,
/// so curves stop at holes. Saddle cells are split using the cell-centre mean.
std::vector<Polyline> contour_lines(const GridArray& values, const Grid2& grid, double level);

struct NamedPolyline {
  std::string name;
  Polyline line;
};

/// CSV with header `curve,segment,x1,x2`; closed polylines repeat their first
/// point at the end.
void write_polylines_csv(std::ostream& out, const std::vector<NamedPolyline>& lines);

}  // namespace planar
