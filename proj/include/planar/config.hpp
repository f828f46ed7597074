// Run configuration: a TOML-style file of [section] blocks with key = value
// lines, read into one SystemConfig per run.
#pragma once

#include "planar/fields.hpp"
#include "planar/geometry.hpp"
#include "planar/helmholtz.hpp"
#include "planar/langevin.hpp"
#include "planar/orbits.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace planar {

enum class DecomposeMethod { Lienard, Modal, Numeric };

struct DecomposeConfig {
  DecomposeMethod method = DecomposeMethod::Numeric;
  LienardSpec lienard;
  ModalSpec modal;
  PoissonOptions poisson;
};

struct HamiltonianConfig {
  std::optional<Expr> alpha;      // criterion I; searched over monomials when absent
  std::optional<Matrix2Field> B;  // criterion II
  Grid2 probe;                    // defaults to the window
  std::optional<Point2> basepoint;
  std::vector<Point2> starts;  // conservation checks along RK4 trajectories
  double t_end = 50.0;
  double dt = 1e-3;
};

struct OrbitsConfig {
  std::vector<AnsatzSpec> ansatz;  // empty means upper and lower with unit entries
  std::vector<Point2> seeds;
  OrbitSearchOptions options;
};

struct SimulateConfig {
  Point2 x0{1.0, 0.0};
  Matrix2Field B;
  double Gamma = 0.0;
  double dt = 1e-3;
  double T = 1.0;
  double record_dt = 0.0;
  std::size_t ensemble_size = 1;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::HeunStratonovich;
  bool transformed = false;  // also simulate in mapping coordinates and compare
  bool binary = false;       // PFL1 instead of CSV
};

struct Fig2Config {
  std::vector<double> J{1.0 / 3.0, 1.0, 3.0};
  std::vector<double> K{-1.0, 0.0, 1.0};
  int n = 256;
  std::vector<double> levels{-0.9, -0.7, -0.5, -0.3, -0.1};
};

struct SystemConfig {
  std::string name = "system";
  ParamMap parameters;
  VectorField2 field;
  Grid2 window = Grid2::square(-2, 2, 64);
  std::optional<Mapping2> mapping;
  DecomposeConfig decompose;
  HamiltonianConfig hamiltonian;
  OrbitsConfig orbits;
  SimulateConfig simulate;
  Fig2Config fig2;
  std::filesystem::path out_dir = "out";
  std::vector<std::string> run;  // subcommands executed by `example`

  ParamSet parameter_names() const;
};

/// Throws ConfigError (with the offending key) or the parser's SyntaxError /
/// UnknownIdentifier for malformed expressions.
SystemConfig parse_config(std::istream& in);
SystemConfig load_config(const std::filesystem::path& path);

/// Ids of the built-in systems and their config text.
const std::vector<std::string>& example_ids();
std::string example_config_text(const std::string& id);
SystemConfig example_config(const std::string& id);

}  // namespace planar
