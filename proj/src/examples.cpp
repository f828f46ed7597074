#include "planar/config.hpp"
#include "planar/errors.hpp"

#include <map>
#include <sstream>

namespace planar {

namespace {

const std::map<std::string, std::string>& registry() {
  static const std::map<std::string, std::string> configs{
      {"harmonic", R"toml(name = "harmonic"
run = ["decompose", "transform", "check-hamiltonian", "exclude-orbits", "find-orbits", "simulate", "fig3"]

[parameters]
gamma = 0
F = 0
w = 1

[field]
u1 = "x2"
u2 = "-gamma*x2 - x1 + F*cos(w*t)"

[window]
x1 = [-3, 3]
x2 = [-3, 3]
nx = 61
ny = 61

[mapping]
preset = "polar"

[decompose]
method = "lienard"
p = "x1"
q = ["gamma"]
forcing = "F*cos(w*t)"

[hamiltonian]
alpha = "1"
B = ["1", "0", "0", "1"]
basepoint = [0, 0]
starts = [[1, 0]]

[orbits]
seeds = [[0.5, 0], [1, 0], [2, 0]]

[simulate]
x0 = [1, 0]
Gamma = 0.05
dt = 1e-3
T = 1
ensemble_size = 2000
seed = 1
transformed = true
)toml"},
      {"lienard", R"toml(name = "lienard"
run = ["decompose", "check-hamiltonian", "exclude-orbits", "find-orbits"]

[parameters]
mu = 0.5

[field]
u1 = "x2"
u2 = "-(x1 + x1^3) - mu*(x1^2 - 1)*x2"

[window]
x1 = [-3, 3]
x2 = [-3, 3]
nx = 61
ny = 61

[decompose]
method = "lienard"
p = "x1 + x1^3"
q = ["-mu", "0", "mu"]

[orbits]
seeds = [[0.5, 0]]
settle = 100
)toml"},
      {"modal", R"toml(name = "modal"
run = ["decompose"]

[parameters]
mu = 1
w = 2

[field]
u1 = "(mu - x1^2)*x1"
u2 = "w"

[window]
x1 = [0.1, 2]
x2 = [-3, 3]
nx = 40
ny = 40

[decompose]
method = "modal"
Gamma = "mu - x1^2"
Omega = "w"
)toml"},
      {"lotka_volterra", R"toml(name = "lotka_volterra"
run = ["check-hamiltonian", "find-orbits"]

[parameters]
A = 1
B = 1
C = 1
D = 1

[field]
u1 = "x1*(A - B*x2)"
u2 = "x2*(C*x1 - D)"

[window]
x1 = [0.1, 3]
x2 = [0.1, 3]
nx = 40
ny = 40

[hamiltonian]
alpha = "1/(x1*x2)"
basepoint = [1, 1]
starts = [[2, 1]]

[orbits]
seeds = [[2, 1]]
)toml"},
      {"kermack", R"toml(name = "kermack"
run = ["check-hamiltonian"]

[parameters]
k = 1
l = 1

[field]
u1 = "-k*x1*x2"
u2 = "k*x1*x2 - l*x2"

[window]
x1 = [0.05, 4]
x2 = [0.05, 4]
nx = 40
ny = 40

[hamiltonian]
alpha = "1/(k*x1*x2)"
basepoint = [1, 1]
starts = [[2, 1]]
)toml"},
      {"kuramoto_pair", R"toml(name = "kuramoto_pair"
run = ["check-hamiltonian", "fig2"]

[parameters]
J = 1
K = -1

[field]
u1 = "-J*sin(x1)*cos(x2)"
u2 = "-K*sin(x2)*cos(x1)"

[window]
x1 = [0.05, 3.09]
x2 = [0.05, 3.09]
nx = 40
ny = 40

[hamiltonian]
alpha = "sin(x2)^(J - 1)/sin(x1)^(K + 1)"
basepoint = [1, 1]
starts = [[1, 1], [1.2, 0.6]]

[fig2]
J = ["1/3", 1, 3]
K = [-1, 0, 1]
)toml"},
      {"strogatz", R"toml(name = "strogatz"
run = ["check-hamiltonian"]

[field]
u1 = "x1*x2"
u2 = "-(x1^2)"

[window]
x1 = [0.1, 3]
x2 = [-2, 2]
nx = 40
ny = 40

[hamiltonian]
alpha = "1/x1"
basepoint = [1, 0]
starts = [[1, 1]]
)toml"},
      {"vanderpol", R"toml(name = "vanderpol"
run = ["decompose", "check-hamiltonian", "exclude-orbits", "find-orbits", "fig3"]

[parameters]
alpha = 0.7

[field]
u1 = "x2"
u2 = "-x1 + alpha*(1 - x1^2)*x2"

[window]
x1 = [-3, 3]
x2 = [-3, 3]
nx = 61
ny = 61

[decompose]
method = "lienard"
p = "x1"
q = ["-alpha", "0", "alpha"]

[hamiltonian]
alpha = "1"

[orbits]
seeds = [[0.5, 0]]
settle = 200
)toml"},
      {"duffing", R"toml(name = "duffing"
run = ["decompose", "check-hamiltonian", "exclude-orbits", "find-orbits", "simulate", "fig3"]

[field]
u1 = "x2"
u2 = "x1 - x1^3"

[window]
x1 = [-2, 2]
x2 = [-2, 2]
nx = 61
ny = 61

[decompose]
method = "lienard"
p = "x1^3 - x1"
q = []

[hamiltonian]
alpha = "1"
basepoint = [0, 0]
starts = [[0.5, 0]]
t_end = 100

[orbits]
seeds = [[0.5, 0], [-0.5, 0], [0, 1]]

[simulate]
x0 = [0.5, 0]
Gamma = 0
dt = 1e-3
T = 100
record_dt = 1
)toml"},
  };
  return configs;
}

}  // namespace

const std::vector<std::string>& example_ids() {
  static const std::vector<std::string> ids{"harmonic", "lienard",       "modal",    "lotka_volterra", "kermack",
                                            "kuramoto_pair", "strogatz", "vanderpol", "duffing"};
  return ids;
}

std::string example_config_text(const std::string& id) {
  auto it = registry().find(id);
  if (it == registry().end()) throw ConfigError("unknown example '" + id + "'");
  return it->second;
}

SystemConfig example_config(const std::string& id) {
  std::istringstream in(example_config_text(id));
  return parse_config(in);
}

}  // namespace planar
