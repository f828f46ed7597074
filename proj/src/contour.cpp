#include "planar/contour.hpp"

#include "format.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <unordered_map>

namespace planar {

namespace {

// Edge ids: horizontal edges (i,j)-(i+1,j) and vertical edges (i,j)-(i,j+1).
struct EdgeIndex {
  int nx, ny;
  std::int64_t horizontal(int i, int j) const { return static_cast<std::int64_t>(j) * nx + i; }
  std::int64_t vertical(int i, int j) const {
    return static_cast<std::int64_t>(nx) * ny + static_cast<std::int64_t>(j) * nx + i;
  }
};

}  // namespace

std::vector<Polyline> contour_lines(const GridArray& values, const Grid2& grid, double level) {
  grid.validate();
  if (values.rows() != grid.nx || values.cols() != grid.ny)
    throw std::invalid_argument("contour_lines: array does not match the grid");
  const EdgeIndex ix{grid.nx, grid.ny};

  std::unordered_map<std::int64_t, Point2> where;
  auto crossing = [&](std::int64_t key, int i0, int j0, int i1, int j1) {
    if (where.count(key)) return key;
    const double v0 = values(i0, j0);
    const double v1 = values(i1, j1);
    const double s = (level - v0) / (v1 - v0);
    where.emplace(key, grid.point(i0, j0) + s * (grid.point(i1, j1) - grid.point(i0, j0)));
    return key;
  };

  std::vector<std::array<std::int64_t, 2>> segments;
  for (int i = 0; i + 1 < grid.nx; ++i) {
    for (int j = 0; j + 1 < grid.ny; ++j) {
      const double a = values(i, j), b = values(i + 1, j), c = values(i + 1, j + 1), d = values(i, j + 1);
      if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) continue;
      const bool A = a > level, B = b > level, C = c > level, D = d > level;
      auto bottom = [&] { return crossing(ix.horizontal(i, j), i, j, i + 1, j); };
      auto right = [&] { return crossing(ix.vertical(i + 1, j), i + 1, j, i + 1, j + 1); };
      auto top = [&] { return crossing(ix.horizontal(i, j + 1), i, j + 1, i + 1, j + 1); };
      auto left = [&] { return crossing(ix.vertical(i, j), i, j, i, j + 1); };
      if (A == C && B == D && A != B) {
        const bool centre = 0.25 * (a + b + c + d) > level;
        if (centre == A) {
          segments.push_back({bottom(), right()});
          segments.push_back({top(), left()});
        } else {
          segments.push_back({bottom(), left()});
          segments.push_back({right(), top()});
        }
        continue;
      }
      std::vector<std::int64_t> hits;
      if (A != B) hits.push_back(bottom());
      if (B != C) hits.push_back(right());
      if (C != D) hits.push_back(top());
      if (D != A) hits.push_back(left());
      if (hits.size() == 2) segments.push_back({hits[0], hits[1]});
    }
  }

  std::unordered_map<std::int64_t, std::vector<std::size_t>> at;
  for (std::size_t s = 0; s < segments.size(); ++s)
    for (auto k : segments[s]) at[k].push_back(s);

  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> out;
  auto walk = [&](std::size_t first, std::int64_t from) {
    Polyline line;
    line.points.push_back(where.at(from));
    std::int64_t key = from;
    std::size_t seg = first;
    for (;;) {
      used[seg] = true;
      key = segments[seg][0] == key ? segments[seg][1] : segments[seg][0];
      if (key == from) {
        line.closed = true;
        break;
      }
      line.points.push_back(where.at(key));
      std::size_t next = segments.size();
      for (auto s : at[key])
        if (!used[s]) next = s;
      if (next == segments.size()) break;
      seg = next;
    }
    out.push_back(std::move(line));
  };

  // Open chains first, starting from their endpoints, then the loops.
  for (std::size_t s = 0; s < segments.size(); ++s)
    for (auto key : segments[s])
      if (!used[s] && at[key].size() == 1) walk(s, key);
  for (std::size_t s = 0; s < segments.size(); ++s)
    if (!used[s]) walk(s, segments[s][0]);
  return out;
}

void write_polylines_csv(std::ostream& out, const std::vector<NamedPolyline>& lines) {
  using detail::number;
  out << "curve,segment,x1,x2\n";
  std::unordered_map<std::string, int> counter;
  for (const auto& [name, line] : lines) {
    const int seg = counter[name]++;
    auto row = [&](const Point2& p) { out << name << ',' << seg << ',' << number(p.x()) << ',' << number(p.y()) << '\n'; };
    for (const auto& p : line.points) row(p);
    if (line.closed && !line.points.empty()) row(line.points.front());
  }
}

}  // namespace planar
