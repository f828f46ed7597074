// Ensembles of x' = F(x, t) + B(x) xi with white Gaussian noise of variance
// Gamma, their mapping between coordinate systems, and moment comparisons.
#pragma once

#include "planar/fields.hpp"
#include "planar/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace planar {

enum class Scheme { EulerMaruyama, HeunStratonovich };

struct LangevinSpec {
  VectorField2 F;
  Matrix2Field B = Matrix2Field::identity();
  double Gamma = 0.0;
  double dt = 1e-3;
  double T = 1.0;
  std::size_t ensemble_size = 1;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::HeunStratonovich;
  ParamMap params;
  /// Spacing of stored samples; 0 stores only t = 0 and t = T. Rounded to a
  /// whole number of steps.
  double record_dt = 0.0;

  void validate() const;
};

enum class MemberStatus : std::uint8_t { Ok, BlowUp, DomainError };

struct Ensemble {
  std::vector<double> times;
  std::size_t members = 0;
  std::vector<Point2> states;  // index time * members + member
  std::vector<MemberStatus> status;
  LangevinSpec spec;

  const Point2& at(std::size_t time, std::size_t member) const { return states[time * members + member]; }
  Point2& at(std::size_t time, std::size_t member) { return states[time * members + member]; }
  std::size_t time_index(double t) const;  // throws std::out_of_range
  std::size_t healthy() const;
};

/// Gaussian increments of one ensemble member: each component is
/// Normal(0, Gamma dt). The stream depends only on (seed, member).
class MemberNoise {
 public:
  MemberNoise(std::uint64_t seed, std::uint64_t member, double Gamma, double dt);
  Vector2 next();

 private:
  struct State;
  std::shared_ptr<State> state_;
  double scale_;
};

/// Members whose |x| exceeds 1e8 (or becomes non-finite) are flagged BlowUp
/// and hold NaN from then on.
Ensemble simulate(const LangevinSpec& spec, const Point2& x0);

/// The same equation in coordinates y with x = f(y): drift J^-1 F(f(y)) and
/// diffusion J^-1 B(f(y)). Under Stratonovich calculus this is exact; J^-1
/// equals h^-1 Q^T from the polar factorisation J = Q h.
LangevinSpec transform_spec(const LangevinSpec& spec, const Mapping2& f);

enum class MapDirection { Forward, Inverse };

/// Forward: x = f(y). Inverse: y = f^-1(x). Points where the map fails are
/// flagged DomainError.
Ensemble map_ensemble(const Ensemble& e, const Mapping2& f, MapDirection direction, const ParamMap& params = {});

struct StatsReport {
  double t = 0.0;
  std::size_t n1 = 0, n2 = 0;
  Vector2 mean1, mean2;
  Matrix2d cov1, cov2;
  Vector2 z_mean;
  Matrix2d z_cov;
  double max_abs_z = 0.0;
};

/// Means and covariances of healthy members at time t, and two-sample
/// z-scores; covariance standard errors use the sample fourth moments.
StatsReport compare_stats(const Ensemble& e1, const Ensemble& e2, double t);

/// Header `t,member,x1,x2`, rows ordered by time then member.
void write_csv(std::ostream& out, const Ensemble& e);

/// "PFL1", uint64 n_times, uint64 n_members, n_times doubles of time, then
/// n_times * n_members * 2 doubles (time-major, member, component), all
/// little-endian.
void write_binary(std::ostream& out, const Ensemble& e);
Ensemble read_binary(std::istream& in);

std::string to_json(const StatsReport& r);

}  // namespace planar
