// Random fixtures shared by the property tests and the acceptance runner.
#pragma once

#include "planar/geometry.hpp"
#include "planar/helmholtz.hpp"

#include <numbers>
#include <random>
#include <vector>

namespace planar::testing {

class Fixtures {
 public:
  explicit Fixtures(std::uint64_t seed) : rng_(seed) {}

  /// Multiples of 1/4 in [-limit, limit]: exact in binary, so symbolic
  /// cancellation is not blurred by rounding.
  double coefficient(double limit = 3.0) {
    const int n = static_cast<int>(4 * limit);
    return std::uniform_int_distribution<int>(-n, n)(rng_) / 4.0;
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::vector<Expr> coefficients(int degree) {
    std::vector<Expr> c;
    for (int k = 0; k <= degree; ++k) c.emplace_back(coefficient());
    return c;
  }

  Expr polynomial(const Expr& v, int degree) {
    Expr p(0.0);
    for (int k = 0; k <= degree; ++k) p = p + Expr(coefficient()) * pow(v, Expr(static_cast<double>(k)));
    return p;
  }

  Expr polynomial2(int degree) {
    Expr p(0.0);
    for (int i = 0; i <= degree; ++i)
      for (int j = 0; i + j <= degree; ++j)
        p = p + Expr(coefficient()) * pow(sym::x1, Expr(static_cast<double>(i))) *
                    pow(sym::x2, Expr(static_cast<double>(j)));
    return p;
  }

  LienardSpec lienard() {
    LienardSpec s;
    switch (integer(0, 3)) {
      case 0:
        s.p = polynomial(sym::x1, integer(0, 5));
        break;
      case 1:
        s.p = Expr(coefficient()) * sin(sym::x1) + polynomial(sym::x1, 2);
        break;
      case 2:
        s.p = Expr(coefficient()) * cos(Expr(2.0) * sym::x1) + Expr(coefficient()) * sym::x1;
        break;
      default:
        s.p = Expr(coefficient()) * exp(Expr(-0.5) * sym::x1) + Expr(coefficient());
        break;
    }
    s.q = coefficients(integer(0, 6));
    return s;
  }

  HelmholtzPair helmholtz_pair() {
    HelmholtzPair hd;
    hd.V = polynomial2(3) + Expr(coefficient()) * sym::x2 * cos(sym::t);
    hd.H = polynomial2(3) + Expr(coefficient()) * sin(sym::x1);
    return hd;
  }

  /// Mappings with a diagonal (or constant) metric, each on a domain where
  /// det J keeps one sign.
  Mapping2 orthogonal_mapping() {
    using sym::x1;
    using sym::x2;
    Mapping2 m;
    switch (integer(0, 4)) {
      case 0: {
        const double th = uniform(-3, 3), a = uniform(0.5, 2), b = uniform(0.5, 2) * (integer(0, 1) ? 1 : -1);
        const double c1 = coefficient(1), c2 = coefficient(1);
        m.f1 = Expr(a * std::cos(th)) * x1 - Expr(b * std::sin(th)) * x2 + Expr(c1);
        m.f2 = Expr(a * std::sin(th)) * x1 + Expr(b * std::cos(th)) * x2 + Expr(c2);
        m.domain = Grid2::square(-2, 2, 32);
        m.note = "linear";
        break;
      }
      case 1: {
        const double s = uniform(0.5, 2);
        m.f1 = Expr(s) * x1 * cos(x2);
        m.f2 = Expr(s) * x1 * sin(x2);
        m.domain = {0.2, 2.5, 32, -3, 3, 32};
        m.note = "polar";
        break;
      }
      case 2:
        m.f1 = exp(x1) * cos(x2);
        m.f2 = exp(x1) * sin(x2);
        m.domain = {-1, 1, 32, -3, 3, 32};
        m.note = "log-polar";
        break;
      case 3: {
        const double c = uniform(0.5, 1.5);
        m.f1 = Expr(c / 2) * (exp(x1) + exp(-x1)) * cos(x2);
        m.f2 = Expr(c / 2) * (exp(x1) - exp(-x1)) * sin(x2);
        m.domain = {0.2, 1.5, 32, -3, 3, 32};
        m.note = "elliptic";
        break;
      }
      default:
        m.f1 = (pow(x1, Expr(2.0)) - pow(x2, Expr(2.0))) / Expr(2.0);
        m.f2 = x1 * x2;
        m.domain = {0.2, 2, 32, -2, 2, 32};
        m.note = "parabolic";
        break;
    }
    return m;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace planar::testing
