#include "cli.hpp"

#include "planar/config.hpp"
#include "planar/errors.hpp"
#include "planar/figures.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace planar;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("planar_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "planar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

fs::path write_config(const TempDir& dir, const std::string& text) {
  const fs::path p = dir / "system.toml";
  std::ofstream(p) << text;
  return p;
}

std::vector<std::string> curves(const json& report) { return report.at("curves").get<std::vector<std::string>>(); }

}  // namespace

TEST_CASE("every example runs") {
  for (const std::string& id : example_ids()) {
    CAPTURE(id);
    TempDir dir;
    const Result r = cli({"example", id, "--out", dir.path().string()});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(fs::exists(dir / "config.toml"));
    // The written config parses back to the same system.
    const SystemConfig a = load_config(dir / "config.toml");
    const SystemConfig b = example_config(id);
    CHECK(a.name == b.name);
    CHECK(a.run == b.run);
    CHECK(to_string(a.field.u1) == to_string(b.field.u1));
    CHECK(to_string(a.field.u2) == to_string(b.field.u2));
  }
}

TEST_CASE("unknown example and usage errors exit 2") {
  Result r = cli({"example", "nope"});
  CHECK(r.code == 2);
  r = cli({"decompose", "--grid", "12"});
  CHECK(r.code == 2);
  r = cli({"frobnicate"});
  CHECK(r.code == 2);
}

TEST_CASE("config errors exit 2 with a JSON message") {
  TempDir dir;
  Result r = cli({"decompose", "--config", (dir / "missing.toml").string()});
  CHECK(r.code == 2);
  const json e = json::parse(r.err);
  CHECK(e.at("error") == "ConfigError");

  fs::path cfg = write_config(dir, "[field]\nu1 = \"x2\"\nu2 = \"-x1\"\n[window]\nbogus = 1\n");
  r = cli({"decompose", "--config", cfg.string()});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err).at("message").get<std::string>().find("bogus") != std::string::npos);

  cfg = write_config(dir, "[field]\nu1 = \"x2 +\"\nu2 = \"-x1\"\n");
  r = cli({"decompose", "--config", cfg.string()});
  CHECK(r.code == 2);

  cfg = write_config(dir, "[field]\nu1 = \"zz\"\nu2 = \"-x1\"\n");
  r = cli({"decompose", "--config", cfg.string()});
  CHECK(r.code == 2);

  cfg = write_config(dir, "[field]\nu1 = \"x2\"\n");
  r = cli({"decompose", "--config", cfg.string()});
  CHECK(r.code == 2);

  cfg = write_config(dir, "[field]\nu1 = \"x2\"\nu2 = \"-x1\"\n[window]\nx1 = [2, -2]\n");
  r = cli({"decompose", "--config", cfg.string()});
  CHECK(r.code == 2);
}

TEST_CASE("numeric failure exits 3") {
  TempDir dir;
  // Criterion II with a singular B.
  const fs::path cfg = write_config(dir,
                                    "[field]\nu1 = \"x2\"\nu2 = \"-x1\"\n"
                                    "[hamiltonian]\nB = [\"0\", \"0\", \"0\", \"0\"]\n");
  const Result r = cli({"check-hamiltonian", "--config", cfg.string(), "--out", dir.path().string()});
  CHECK(r.code == 3);
  CHECK(json::parse(r.err).contains("error"));
}

TEST_CASE("decompose") {
  TempDir dir;
  REQUIRE(cli({"example", "harmonic", "--out", dir.path().string()}).code == 0);
  json d = load(dir / "decompose.json");
  CHECK(d.at("matches_field") == true);
  CHECK(d.at("H") == "x1^2/2 + x2^2/2");

  const fs::path cfg = write_config(dir, "[field]\nu1 = \"0\"\nu2 = \"0\"\n");
  REQUIRE(cli({"decompose", "--config", cfg.string(), "--out", (dir / "zero").string()}).code == 0);
  d = load(dir / "zero" / "decompose.json");
  CHECK(d.at("method") == "numeric");
  std::ifstream csv(dir / "zero" / "decompose_grid.csv");
  std::string line;
  std::getline(csv, line);
  std::size_t rows = 0;
  double vmax = 0;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string cell;
    for (int k = 0; std::getline(row, cell, ','); ++k)
      if (k >= 2) vmax = std::max(vmax, std::abs(std::stod(cell)));
    ++rows;
  }
  CHECK(rows > 0);
  CHECK(vmax == 0.0);
}

TEST_CASE("check-hamiltonian") {
  TempDir dir;
  REQUIRE(cli({"example", "kermack", "--out", (dir / "k").string()}).code == 0);
  json h = load(dir / "k" / "hamiltonian.json");
  CHECK(h.at("verdict") == "Hamiltonian");
  for (const json& run : h.at("conservation")) CHECK(run.at("relative_drift").get<double>() <= 1e-6);

  REQUIRE(cli({"example", "vanderpol", "--out", (dir / "v").string()}).code == 0);
  h = load(dir / "v" / "hamiltonian.json");
  CHECK(h.at("verdict") == "NotHamiltonian");

  const fs::path cfg = write_config(dir,
                                    "[field]\nu1 = \"x2\"\nu2 = \"-x1\"\n"
                                    "[hamiltonian]\nB = [\"1\", \"0\", \"0\", \"1\"]\n");
  REQUIRE(cli({"check-hamiltonian", "--config", cfg.string(), "--out", (dir / "b").string()}).code == 0);
  h = load(dir / "b" / "hamiltonian.json");
  CHECK(h.at("verdict") == "Hamiltonian");
}

TEST_CASE("exclude-orbits singular curves") {
  TempDir dir;
  REQUIRE(cli({"example", "duffing", "--out", (dir / "d").string()}).code == 0);
  std::vector<std::string> up = curves(load(dir / "d" / "exclusion_upper.json"));
  std::vector<std::string> lo = curves(load(dir / "d" / "exclusion_lower.json"));
  CHECK(up == std::vector<std::string>{"1 + x1 = 0", "x1 = 0", "-1 + x1 = 0"});
  CHECK(lo == std::vector<std::string>{"x2 = 0"});

  REQUIRE(cli({"example", "harmonic", "--out", (dir / "h").string()}).code == 0);
  up = curves(load(dir / "h" / "exclusion_upper.json"));
  lo = curves(load(dir / "h" / "exclusion_lower.json"));
  CHECK(up == std::vector<std::string>{"x1 = 0"});
  CHECK(lo == std::vector<std::string>{"x2 = 0"});

  const fs::path cfg = write_config(dir, "[field]\nu1 = \"1\"\nu2 = \"0\"\n");
  REQUIRE(cli({"exclude-orbits", "--config", cfg.string(), "--out", (dir / "u").string()}).code == 0);
  CHECK(load(dir / "u" / "exclusion_upper.json").at("error") == "DegenerateODE");
  const json e = load(dir / "u" / "exclusion_lower.json");
  CHECK(curves(e).empty());
  REQUIRE(e.at("regions").size() == 1);
  CHECK(e.at("regions")[0].at("cells") == e.at("cells").at("pd"));
}

TEST_CASE("fig2 values and closed levels") {
  constexpr double h = std::numbers::pi / 2;
  CHECK(fig2_value(1, -1, {h, h}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(fig2_value(1, 1, {0.0, 1.0}) == -1.0);
  CHECK(fig2_value(1, 1, {1.0, 0.0}) == 0.0);
  CHECK(fig2_value(2, 0, {0.3, h / 2}) == doctest::Approx(-0.5));

  TempDir dir;
  REQUIRE(cli({"fig2", "--J", "1", "--K", "-1,1", "--out", dir.path().string()}).code == 0);
  const json f = load(dir / "fig2.json");
  REQUIRE(f.at("panels").size() == 2);
  for (const json& p : f.at("panels")) {
    if (p.at("K").get<double>() < 0)
      CHECK_FALSE(p.at("closed_levels").empty());
    else
      CHECK(p.at("closed_levels").empty());
  }
  std::ifstream csv(dir / "fig2_0_0.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "x1,x2,value,clipped");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 256u * 256u);
}

TEST_CASE("global overrides") {
  TempDir dir;
  const fs::path cfg = write_config(dir, "[field]\nu1 = \"x2\"\nu2 = \"-x1\"\n");
  REQUIRE(cli({"decompose", "--config", cfg.string(), "--out", dir.path().string(), "--grid", "10,9"}).code == 0);
  CHECK(load(dir / "decompose.json").at("method") == "numeric");
  std::ifstream csv(dir / "decompose_grid.csv");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 1 + 10 * 9);
}

TEST_CASE("identical runs give identical files") {
  TempDir a, b;
  for (const TempDir* d : {&a, &b}) {
    REQUIRE(cli({"example", "harmonic", "--out", d->path().string(), "--seed", "7"}).code == 0);
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a.path())) {
    const fs::path other = b / entry.path().filename().string();
    CAPTURE(entry.path().filename().string());
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
    ++files;
  }
  CHECK(files > 5);
  CHECK_FALSE(fs::exists(a / "ensemble.csv.tmp"));

  TempDir c;
  REQUIRE(cli({"example", "harmonic", "--out", c.path().string(), "--seed", "8"}).code == 0);
  CHECK(slurp(a / "ensemble.csv") != slurp(c / "ensemble.csv"));
}
