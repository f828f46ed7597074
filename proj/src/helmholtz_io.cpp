#include "planar/helmholtz.hpp"

#include "format.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace planar {

namespace {

using detail::number;

double parse_number(std::string_view s, std::size_t line) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw std::invalid_argument("grid csv: bad number on line " + std::to_string(line));
  return v;
}

// Sorted distinct coordinates, merging values closer than a tiny fraction of the span.
std::vector<double> distinct(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double tol = 1e-9 * std::max(1.0, v.back() - v.front());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  return out;
}

void check_uniform(const std::vector<double>& c, const char* axis) {
  const double h = (c.back() - c.front()) / static_cast<double>(c.size() - 1);
  for (std::size_t k = 0; k < c.size(); ++k)
    if (std::fabs(c[k] - (c.front() + h * static_cast<double>(k))) > 1e-6 * h)
      throw std::invalid_argument(std::string("grid csv: ") + axis + " is not uniformly spaced");
}

}  // namespace

void write_csv(std::ostream& out, const GridField& f) {
  out << "x1,x2,u1,u2\n";
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i)
      out << number(f.grid.x1(i)) << ',' << number(f.grid.x2(j)) << ',' << number(f.u1(i, j)) << ','
          << number(f.u2(i, j)) << '\n';
}

GridField read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("grid csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x1,x2,u1,u2") throw std::invalid_argument("grid csv: expected header x1,x2,u1,u2");

  std::vector<std::array<double, 4>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 4> r{};
    std::string_view rest(line);
    for (int k = 0; k < 4; ++k) {
      const auto comma = rest.find(',');
      if ((k < 3) != (comma != std::string_view::npos))
        throw std::invalid_argument("grid csv: expected 4 columns on line " + std::to_string(lineno));
      r[k] = parse_number(rest.substr(0, comma), lineno);
      if (k < 3) rest.remove_prefix(comma + 1);
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw std::invalid_argument("grid csv: no data rows");

  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    xs.push_back(r[0]);
    ys.push_back(r[1]);
  }
  const auto cx = distinct(std::move(xs));
  const auto cy = distinct(std::move(ys));
  if (cx.size() < 2 || cy.size() < 2 || cx.size() * cy.size() != rows.size())
    throw std::invalid_argument("grid csv: rows do not form a complete rectangular grid");
  check_uniform(cx, "x1");
  check_uniform(cy, "x2");

  GridField f;
  f.grid = Grid2{cx.front(), cx.back(), static_cast<int>(cx.size()), cy.front(), cy.back(), static_cast<int>(cy.size())};
  f.u1 = GridArray::Constant(f.grid.nx, f.grid.ny, std::nan(""));
  f.u2 = f.u1;
  for (const auto& r : rows) {
    const Eigen::Vector2i ij = f.grid.nearest(Point2(r[0], r[1]));
    const int i = ij.x(), j = ij.y();
    if (!std::isnan(f.u1(i, j))) throw std::invalid_argument("grid csv: duplicate node");
    f.u1(i, j) = r[2];
    f.u2(i, j) = r[3];
  }
  f.validate();
  return f;
}

std::string to_json(const GridField& f) {
  nlohmann::json j;
  j["grid"] = {{"x1_min", f.grid.x1_min}, {"x1_max", f.grid.x1_max}, {"nx", f.grid.nx},
               {"x2_min", f.grid.x2_min}, {"x2_max", f.grid.x2_max}, {"ny", f.grid.ny}};
  std::vector<double> a, b;
  a.reserve(f.grid.size());
  b.reserve(a.capacity());
  for (int jj = 0; jj < f.grid.ny; ++jj)
    for (int i = 0; i < f.grid.nx; ++i) {
      a.push_back(f.u1(i, jj));
      b.push_back(f.u2(i, jj));
    }
  j["u1"] = a;
  j["u2"] = b;
  return j.dump();
}

GridField grid_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("grid json: ") + e.what());
  }
  try {
    const auto& g = j.at("grid");
    GridField f;
    f.grid = Grid2{g.at("x1_min").get<double>(), g.at("x1_max").get<double>(), g.at("nx").get<int>(),
                   g.at("x2_min").get<double>(), g.at("x2_max").get<double>(), g.at("ny").get<int>()};
    f.grid.validate();
    const auto a = j.at("u1").get<std::vector<double>>();
    const auto b = j.at("u2").get<std::vector<double>>();
    const auto n = f.grid.size();
    if (a.size() != n || b.size() != n) throw std::invalid_argument("grid json: array length does not match the grid");
    f.u1.resize(f.grid.nx, f.grid.ny);
    f.u2.resize(f.grid.nx, f.grid.ny);
    for (int jj = 0; jj < f.grid.ny; ++jj)
      for (int i = 0; i < f.grid.nx; ++i) {
        f.u1(i, jj) = a[i + static_cast<std::size_t>(f.grid.nx) * jj];
        f.u2(i, jj) = b[i + static_cast<std::size_t>(f.grid.nx) * jj];
      }
    f.validate();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("grid json: ") + e.what());
  }
}

}  // namespace planar
