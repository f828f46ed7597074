#include "planar/langevin.hpp"

#include "format.hpp"
#include "planar/errors.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <json.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>

namespace planar {

void LangevinSpec::validate() const {
  if (!(dt > 0) || !(T > 0)) throw std::invalid_argument("langevin: dt and T must be positive");
  if (dt > T) throw std::invalid_argument("langevin: dt exceeds T");
  if (!(Gamma >= 0)) throw std::invalid_argument("langevin: Gamma must be non-negative");
  if (ensemble_size < 1) throw std::invalid_argument("langevin: empty ensemble");
  if (record_dt < 0) throw std::invalid_argument("langevin: record_dt must be non-negative");
}

std::size_t Ensemble::time_index(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  throw std::out_of_range("ensemble has no sample at t = " + std::to_string(t));
}

std::size_t Ensemble::healthy() const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), MemberStatus::Ok));
}

struct MemberNoise::State {
  boost::random::mt19937_64 engine;
  boost::random::normal_distribution<double> normal;
};

MemberNoise::MemberNoise(std::uint64_t seed, std::uint64_t member, double Gamma, double dt)
    : state_(std::make_shared<State>()), scale_(std::sqrt(Gamma * dt)) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(member), static_cast<std::uint32_t>(member >> 32)};
  state_->engine.seed(seq);
}

Vector2 MemberNoise::next() {
  const double a = state_->normal(state_->engine);
  const double b = state_->normal(state_->engine);
  return {scale_ * a, scale_ * b};
}

namespace {

constexpr double kBlowUp = 1e8;

// B(x) with a shortcut for constant tensors.
class Diffusion {
 public:
  Diffusion(const Matrix2Field& B, const ParamMap& params) {
    constant_ = true;
    for (int k = 0; k < 4; ++k) {
      const Expr e = simplify(bind(B.a[k], params));
      c_[k] = CompiledExpr(e);
      if (!e.is_constant()) constant_ = false;
    }
    if (constant_) fixed_ << c_[0](0, 0), c_[1](0, 0), c_[2](0, 0), c_[3](0, 0);
  }

  Matrix2d operator()(const Point2& x, double t) const {
    if (constant_) return fixed_;
    Matrix2d m;
    m << c_[0](x, t), c_[1](x, t), c_[2](x, t), c_[3](x, t);
    return m;
  }

  bool constant() const { return constant_; }

 private:
  std::array<CompiledExpr, 4> c_;
  Matrix2d fixed_;
  bool constant_ = false;
};

}  // namespace

Ensemble simulate(const LangevinSpec& spec, const Point2& x0) {
  spec.validate();
  const CompiledField2 F(spec.F, spec.params);
  const Diffusion B(spec.B, spec.params);

  const auto steps = static_cast<std::size_t>(std::ceil(spec.T / spec.dt - 1e-9));
  std::size_t stride = steps;
  if (spec.record_dt > 0) stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(spec.record_dt / spec.dt)));
  auto time_of = [&](std::size_t k) { return k == steps ? spec.T : static_cast<double>(k) * spec.dt; };

  Ensemble e;
  e.spec = spec;
  e.members = spec.ensemble_size;
  for (std::size_t k = 0; k <= steps; k += stride) e.times.push_back(time_of(k));
  if (steps % stride != 0) e.times.push_back(spec.T);
  e.states.assign(e.times.size() * e.members, Point2::Constant(std::numeric_limits<double>::quiet_NaN()));
  e.status.assign(e.members, MemberStatus::Ok);

  for (std::size_t m = 0; m < e.members; ++m) {
    MemberNoise noise(spec.seed, m, spec.Gamma, spec.dt);
    Point2 x = x0;
    std::size_t slot = 0;
    e.at(slot++, m) = x;
    try {
      for (std::size_t k = 1; k <= steps; ++k) {
        const double t = time_of(k - 1);
        const double h = time_of(k) - t;
        Vector2 dW = noise.next();
        if (h != spec.dt) dW *= std::sqrt(h / spec.dt);
        const Vector2 f0 = F(x, t);
        const Matrix2d b0 = B(x, t);
        if (spec.scheme == Scheme::EulerMaruyama) {
          x = x + f0 * h + b0 * dW;
        } else {
          const Point2 pred = x + f0 * h + b0 * dW;
          const Vector2 f1 = F(pred, t + h);
          const Vector2 noise_term = B.constant() ? Vector2(b0 * dW) : Vector2(0.5 * (b0 + B(pred, t + h)) * dW);
          x = x + 0.5 * (f0 + f1) * h + noise_term;
        }
        if (!x.allFinite() || x.norm() > kBlowUp) {
          e.status[m] = MemberStatus::BlowUp;
          break;
        }
        if (k % stride == 0 || k == steps) e.at(slot++, m) = x;
      }
    } catch (const DomainError&) {
      e.status[m] = MemberStatus::DomainError;
    }
  }
  return e;
}

LangevinSpec transform_spec(const LangevinSpec& spec, const Mapping2& f) {
  LangevinSpec out = spec;
  out.F = pushforward(spec.F, f, spec.params);
  const std::map<Var, Expr> sub{{Var::X1, f.f1}, {Var::X2, f.f2}};
  Matrix2Field composed;
  for (int k = 0; k < 4; ++k) composed.a[k] = substitute(spec.B.a[k], sub);
  out.B = (inverse(jacobian(f)) * composed).simplified();
  return out;
}

Ensemble map_ensemble(const Ensemble& e, const Mapping2& f, MapDirection direction, const ParamMap& params) {
  Ensemble out = e;
  const CompiledExpr f1(f.f1, params), f2(f.f2, params);
  for (std::size_t m = 0; m < e.members; ++m) {
    if (out.status[m] != MemberStatus::Ok) continue;
    try {
      for (std::size_t k = 0; k < e.times.size(); ++k) {
        const Point2& p = e.at(k, m);
        out.at(k, m) = direction == MapDirection::Forward ? Point2(f1(p, e.times[k]), f2(p, e.times[k]))
                                                          : f.invert(p, params);
      }
    } catch (const DomainError&) {
      out.status[m] = MemberStatus::DomainError;
      for (std::size_t k = 0; k < e.times.size(); ++k) out.at(k, m).setConstant(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

namespace {

struct Moments {
  std::size_t n = 0;
  Vector2 mean = Vector2::Zero();
  Matrix2d cov = Matrix2d::Zero();
  Matrix2d cov_var = Matrix2d::Zero();  // variance of each covariance estimate
};

Moments moments(const Ensemble& e, std::size_t k) {
  Moments mo;
  for (std::size_t m = 0; m < e.members; ++m) {
    if (e.status[m] != MemberStatus::Ok) continue;
    mo.mean += e.at(k, m);
    ++mo.n;
  }
  if (mo.n < 2) throw std::invalid_argument("compare_stats: fewer than two healthy members");
  const double n = static_cast<double>(mo.n);
  mo.mean /= n;
  Matrix2d m4 = Matrix2d::Zero();
  for (std::size_t m = 0; m < e.members; ++m) {
    if (e.status[m] != MemberStatus::Ok) continue;
    const Vector2 d = e.at(k, m) - mo.mean;
    const Matrix2d outer = d * d.transpose();
    mo.cov += outer;
    m4 += outer.cwiseProduct(outer);
  }
  mo.cov /= n - 1.0;
  m4 /= n;
  mo.cov_var = (m4 - mo.cov.cwiseProduct(mo.cov)) / n;
  return mo;
}

}  // namespace

StatsReport compare_stats(const Ensemble& e1, const Ensemble& e2, double t) {
  const Moments a = moments(e1, e1.time_index(t));
  const Moments b = moments(e2, e2.time_index(t));
  StatsReport r;
  r.t = t;
  r.n1 = a.n, r.n2 = b.n;
  r.mean1 = a.mean, r.mean2 = b.mean;
  r.cov1 = a.cov, r.cov2 = b.cov;
  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt(a.cov(i, i) / a.n + b.cov(i, i) / b.n);
    r.z_mean(i) = se > 0 ? (a.mean(i) - b.mean(i)) / se : (a.mean(i) == b.mean(i) ? 0.0 : INFINITY);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt(a.cov_var(i, j) + b.cov_var(i, j));
      const double diff = a.cov(i, j) - b.cov(i, j);
      r.z_cov(i, j) = se > 0 ? diff / se : (diff == 0 ? 0.0 : INFINITY);
    }
  r.max_abs_z = std::max(r.z_mean.cwiseAbs().maxCoeff(), r.z_cov.cwiseAbs().maxCoeff());
  return r;
}

void write_csv(std::ostream& out, const Ensemble& e) {
  using detail::number;
  out << "t,member,x1,x2\n";
  for (std::size_t k = 0; k < e.times.size(); ++k) {
    const std::string t = number(e.times[k]);
    for (std::size_t m = 0; m < e.members; ++m) {
      const Point2& p = e.at(k, m);
      out << t << ',' << m << ',' << number(p.x()) << ',' << number(p.y()) << '\n';
    }
  }
}

namespace {

template <typename T>
void put_le(std::ostream& out, T v) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) throw std::invalid_argument("PFL1: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace

void write_binary(std::ostream& out, const Ensemble& e) {
  out.write("PFL1", 4);
  put_le<std::uint64_t>(out, e.times.size());
  put_le<std::uint64_t>(out, e.members);
  for (double t : e.times) put_le(out, t);
  for (const auto& p : e.states) {
    put_le(out, p.x());
    put_le(out, p.y());
  }
}

Ensemble read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "PFL1", 4) != 0) throw std::invalid_argument("PFL1: bad magic");
  const auto n_times = get_le<std::uint64_t>(in);
  const auto n_members = get_le<std::uint64_t>(in);
  if (n_times > (1ull << 32) || n_members > (1ull << 32)) throw std::invalid_argument("PFL1: implausible header");
  Ensemble e;
  e.members = n_members;
  e.times.resize(n_times);
  for (auto& t : e.times) t = get_le<double>(in);
  e.states.resize(n_times * n_members);
  for (auto& p : e.states) {
    p.x() = get_le<double>(in);
    p.y() = get_le<double>(in);
  }
  e.status.assign(n_members, MemberStatus::Ok);
  for (std::size_t m = 0; m < n_members; ++m)
    for (std::size_t k = 0; k < n_times; ++k)
      if (!e.at(k, m).allFinite()) e.status[m] = MemberStatus::BlowUp;
  return e;
}

std::string to_json(const StatsReport& r) {
  auto vec = [](const Vector2& v) { return nlohmann::json{v(0), v(1)}; };
  auto mat = [](const Matrix2d& m) { return nlohmann::json{{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}; };
  nlohmann::json j = {{"t", r.t},
                      {"n", {r.n1, r.n2}},
                      {"mean", {vec(r.mean1), vec(r.mean2)}},
                      {"cov", {mat(r.cov1), mat(r.cov2)}},
                      {"z_mean", vec(r.z_mean)},
                      {"z_cov", mat(r.z_cov)},
                      {"max_abs_z", r.max_abs_z}};
  return j.dump(2);
}

}  // namespace planar
