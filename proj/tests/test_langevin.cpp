#include "doctest_expr.hpp"

#include "planar/errors.hpp"
#include "planar/langevin.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

using namespace planar;
using planar::sym::x1;
using planar::sym::x2;

namespace {

constexpr double pi = std::numbers::pi;

VectorField2 harmonic() { return {x2, -x1}; }
VectorField2 damped(double gamma) { return {x2, -x1 - Expr(gamma) * x2}; }
VectorField2 duffing() { return {x2, parse("x1 - x1^3")}; }

LangevinSpec spec_for(VectorField2 F, double Gamma, double dt, double T, std::size_t n, std::uint64_t seed = 1) {
  LangevinSpec s;
  s.F = std::move(F);
  s.Gamma = Gamma;
  s.dt = dt;
  s.T = T;
  s.ensemble_size = n;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("spec validation") {
  auto s = spec_for(harmonic(), 0.1, 1e-3, 1, 1);
  CHECK_NOTHROW(s.validate());
  s.dt = 2;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.dt = 1e-3, s.Gamma = -1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.Gamma = 0, s.ensemble_size = 0;
  CHECK_THROWS_AS(simulate(s, {1, 0}), std::invalid_argument);
}

TEST_CASE("deterministic harmonic returns to its start") {
  const auto s = spec_for(harmonic(), 0.0, 1e-3, 2 * pi, 3);
  const Ensemble e = simulate(s, {1, 0});
  REQUIRE(e.times.size() == 2);
  CHECK(e.times.back() == doctest::Approx(2 * pi).epsilon(1e-15));
  for (std::size_t m = 0; m < 3; ++m) CHECK((e.at(1, m) - Point2(1, 0)).norm() < 1e-5);
}

TEST_CASE("euler-maruyama is first order without noise") {
  auto s = spec_for(harmonic(), 0.0, 1e-4, 1.0, 1);
  s.scheme = Scheme::EulerMaruyama;
  const Point2 end = simulate(s, {1, 0}).at(1, 0);
  CHECK((end - Point2(std::cos(1.0), -std::sin(1.0))).norm() < 1e-3);
}

TEST_CASE("record_dt stores intermediate samples") {
  auto s = spec_for(harmonic(), 0.0, 1e-3, 1.0, 2);
  s.record_dt = 0.25;
  const Ensemble e = simulate(s, {1, 0});
  REQUIRE(e.times.size() == 5);
  CHECK(e.time_index(0.5) == 2);
  CHECK_THROWS_AS(e.time_index(0.3), std::out_of_range);
  CHECK(e.at(2, 1).x() == doctest::Approx(std::cos(0.5)).epsilon(1e-6));
}

TEST_CASE("increments have variance Gamma dt") {
  const double Gamma = 0.05, dt = 1e-3;
  MemberNoise noise(42, 7, Gamma, dt);
  const int n = 1'000'000;
  Vector2 sum = Vector2::Zero(), sq = Vector2::Zero();
  for (int k = 0; k < n; ++k) {
    const Vector2 w = noise.next();
    sum += w;
    sq += w.cwiseProduct(w);
  }
  const Vector2 mean = sum / n;
  const Vector2 var = sq / n - mean.cwiseProduct(mean);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(var(i) / (Gamma * dt) - 1) < 0.01);
    CHECK(std::abs(mean(i)) < 5 * std::sqrt(Gamma * dt / n));
  }
}

TEST_CASE("noise streams depend on seed and member only") {
  MemberNoise a(3, 0, 1, 1), b(3, 0, 1, 1), c(3, 1, 1, 1), d(4, 0, 1, 1);
  const Vector2 va = a.next();
  CHECK(va == b.next());
  CHECK(va != c.next());
  CHECK(va != d.next());
}

TEST_CASE("same seed gives bit-identical ensembles") {
  auto s = spec_for(damped(0.5), 0.1, 1e-2, 1.0, 50, 99);
  s.record_dt = 0.1;
  const Ensemble a = simulate(s, {1, 0});
  const Ensemble b = simulate(s, {1, 0});
  REQUIRE(a.states.size() == b.states.size());
  CHECK(std::memcmp(a.states.data(), b.states.data(), a.states.size() * sizeof(Point2)) == 0);
  s.seed = 100;
  const Ensemble c = simulate(s, {1, 0});
  CHECK(c.at(1, 0) != a.at(1, 0));

  // A member's path does not depend on how many members there are.
  s.seed = 99;
  s.ensemble_size = 5;
  const Ensemble small = simulate(s, {1, 0});
  for (std::size_t k = 0; k < small.times.size(); ++k) CHECK(small.at(k, 4) == a.at(k, 4));
}

TEST_CASE("stationary covariance of the damped oscillator solves the Lyapunov equation") {
  // A = [[0, 1], [-1, -0.5]], Gamma = 0.1: A S + S A^T + Gamma I = 0.
  const Matrix2d lyapunov{{0.225, -0.05}, {-0.05, 0.2}};
  const Matrix2d A{{0, 1}, {-1, -0.5}};
  CHECK((A * lyapunov + lyapunov * A.transpose() + 0.1 * Matrix2d::Identity()).norm() < 1e-15);

  const auto s = spec_for(damped(0.5), 0.1, 1e-2, 40.0, 8000, 5);
  const Ensemble e = simulate(s, {0, 0});
  REQUIRE(e.healthy() == 8000);
  Vector2 mean = Vector2::Zero();
  for (std::size_t m = 0; m < e.members; ++m) mean += e.at(1, m);
  mean /= double(e.members);
  Matrix2d cov = Matrix2d::Zero();
  for (std::size_t m = 0; m < e.members; ++m) {
    const Vector2 d = e.at(1, m) - mean;
    cov += d * d.transpose();
  }
  cov /= double(e.members - 1);
  CAPTURE(cov);
  CHECK((cov - lyapunov).cwiseAbs().maxCoeff() < 0.02);
  CHECK(mean.norm() < 0.03);
}

TEST_CASE("duffing energy is conserved without noise") {
  auto H = [](const Point2& p) { return 0.5 * (p.y() * p.y() - p.x() * p.x()) + std::pow(p.x(), 4) / 4; };
  auto drift = [&](double dt) {
    auto s = spec_for(duffing(), 0.0, dt, 100.0, 1);
    s.record_dt = 1.0;
    const Ensemble e = simulate(s, {0.5, 0});
    const double h0 = H(e.at(0, 0));
    double worst = 0;
    for (std::size_t k = 0; k < e.times.size(); ++k) worst = std::max(worst, std::abs(H(e.at(k, 0)) - h0));
    return worst;
  };
  const double coarse = drift(1e-3), fine = drift(2.5e-4);
  MESSAGE("energy drift over T = 100: " << coarse << " at dt = 1e-3, " << fine << " at dt = 2.5e-4");
  // Heun is second order, so 1e-8 needs dt = 2.5e-4; at 1e-3 the drift is ~7e-8.
  CHECK(coarse < 1e-7);
  CHECK(fine < 1e-8);
  CHECK(coarse / fine == doctest::Approx(16).epsilon(0.1));
}

TEST_CASE("runaway members are flagged and the rest continue") {
  auto s = spec_for({x1 * x1, Expr(0.0)}, 0.0, 1e-3, 2.0, 2);
  const Ensemble e = simulate(s, {1, 0});
  CHECK(e.healthy() == 0);
  CHECK(e.status[0] == MemberStatus::BlowUp);
  CHECK(std::isnan(e.at(1, 0).x()));

  auto ok = spec_for(harmonic(), 0.0, 1e-3, 1.0, 1);
  CHECK(simulate(ok, {1, 0}).healthy() == 1);
}

TEST_CASE("map_ensemble") {
  auto s = spec_for(harmonic(), 0.2, 1e-2, 1.0, 20);
  s.record_dt = 0.5;
  const Ensemble cart = simulate(s, {1, 0.5});

  SUBCASE("identity leaves paths unchanged") {
    const Ensemble same = map_ensemble(cart, Mapping2::identity(), MapDirection::Forward);
    CHECK(same.states == cart.states);
  }
  SUBCASE("polar inverse then forward is the identity") {
    const Mapping2 polar = Mapping2::polar();
    const Ensemble pol = map_ensemble(cart, polar, MapDirection::Inverse);
    const Ensemble back = map_ensemble(pol, polar, MapDirection::Forward);
    double err = 0;
    for (std::size_t i = 0; i < cart.states.size(); ++i) err = std::max(err, (back.states[i] - cart.states[i]).norm());
    CHECK(err <= 1e-12);
    const Point2 p = cart.at(1, 3);
    CHECK(pol.at(1, 3).x() == doctest::Approx(std::hypot(p.x(), p.y())));
    CHECK(pol.at(1, 3).y() == doctest::Approx(std::atan2(p.y(), p.x())));
  }
  SUBCASE("no inverse flags every member") {
    Mapping2 f = Mapping2::identity();
    f.inverse.reset();
    f.numeric_inverse = nullptr;
    const Ensemble out = map_ensemble(cart, f, MapDirection::Inverse);
    CHECK(out.healthy() == 0);
  }
}

TEST_CASE("transformed spec for polar coordinates") {
  const Mapping2 polar = Mapping2::polar();
  const LangevinSpec t = transform_spec(spec_for(damped(0.5), 0.05, 1e-3, 1, 1), polar);
  for (double A : {0.5, 1.0, 2.0})
    for (double phi : {-2.0, 0.3, 1.4}) {
      CAPTURE(A);
      CAPTURE(phi);
      const Vector2 drift = t.F(Point2(A, phi));
      CHECK(drift(0) == doctest::Approx(-0.5 * A * std::pow(std::sin(phi), 2)).epsilon(1e-12));
      CHECK(drift(1) == doctest::Approx(-1 - 0.5 * std::sin(phi) * std::cos(phi)).epsilon(1e-12));
      const Matrix2d b = t.B(Point2(A, phi));
      const Matrix2d expect{{std::cos(phi), std::sin(phi)}, {-std::sin(phi) / A, std::cos(phi) / A}};
      CHECK((b - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("cartesian ensembles mapped to polar agree with direct polar simulation") {
  const Mapping2 polar = Mapping2::polar();
  auto cart_spec = spec_for(damped(0.5), 0.05, 1e-3, 1.0, 20000, 11);
  auto pol_spec = transform_spec(cart_spec, polar);
  pol_spec.seed = 12;

  const Ensemble mapped = map_ensemble(simulate(cart_spec, {1, 0}), polar, MapDirection::Inverse);
  const Ensemble direct = simulate(pol_spec, {1, 0});
  const StatsReport r = compare_stats(mapped, direct, 1.0);
  CAPTURE(r.z_mean);
  CAPTURE(r.z_cov);
  CHECK(r.n1 == 20000);
  CHECK(r.max_abs_z <= 3.5);

  SUBCASE("without noise the paths coincide") {
    cart_spec.Gamma = pol_spec.Gamma = 0;
    cart_spec.ensemble_size = pol_spec.ensemble_size = 1;
    const Point2 a = map_ensemble(simulate(cart_spec, {1, 0}), polar, MapDirection::Inverse).at(1, 0);
    const Point2 b = simulate(pol_spec, {1, 0}).at(1, 0);
    CHECK((a - b).norm() <= 1e-6);
  }
}

TEST_CASE("compare_stats") {
  auto s = spec_for(damped(0.5), 0.1, 1e-2, 1.0, 4000, 1);
  const Ensemble a = simulate(s, {1, 0});
  s.seed = 2;
  const Ensemble b = simulate(s, {1, 0});
  const StatsReport same = compare_stats(a, b, 1.0);
  CHECK(same.max_abs_z <= 4);
  CHECK(compare_stats(a, a, 1.0).max_abs_z == 0);
  CHECK_THROWS_AS(compare_stats(a, b, 0.5), std::out_of_range);

  s.seed = 3;
  const Ensemble shifted = simulate(s, {1.2, 0});
  CHECK(compare_stats(a, shifted, 1.0).max_abs_z > 10);

  const auto j = nlohmann::json::parse(to_json(same));
  CHECK(j["n"][0] == 4000);
  CHECK(j["z_cov"].size() == 2);
}

TEST_CASE("csv and binary export") {
  auto s = spec_for(harmonic(), 0.1, 1e-2, 0.5, 3);
  s.record_dt = 0.25;
  const Ensemble e = simulate(s, {1, 0});

  std::ostringstream csv;
  write_csv(csv, e);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "t,member,x1,x2");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 9);

  std::stringstream bin;
  write_binary(bin, e);
  const std::string bytes = bin.str();
  CHECK(bytes.substr(0, 4) == "PFL1");
  CHECK(bytes.size() == 4 + 16 + 3 * 8 + 9 * 16);
  const Ensemble back = read_binary(bin);
  CHECK(back.times == e.times);
  CHECK(back.states == e.states);

  std::istringstream bad("PFL2xxxxxxxx");
  CHECK_THROWS_AS(read_binary(bad), std::invalid_argument);
  std::istringstream truncated(bytes.substr(0, 30));
  CHECK_THROWS_AS(read_binary(truncated), std::invalid_argument);
}
