#include "planar/config.hpp"

#include "planar/errors.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace planar {

namespace pt = boost::property_tree;

ParamSet SystemConfig::parameter_names() const {
  ParamSet names;
  for (const auto& [k, v] : parameters) names.insert(k);
  return names;
}

namespace {

std::string strip_comment(const std::string& raw) {
  bool quoted = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '"') quoted = !quoted;
    if (raw[i] == '#' && !quoted) return boost::algorithm::trim_copy(raw.substr(0, i));
  }
  return boost::algorithm::trim_copy(raw);
}

std::string unquote(std::string s) {
  boost::algorithm::trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

// Top-level items of "[a, [b, c], "d, e"]".
std::vector<std::string> split_list(const std::string& text, const std::string& key) {
  std::string s = boost::algorithm::trim_copy(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw ConfigError(key + ": expected a [ ... ] list");
  s = s.substr(1, s.size() - 2);
  std::vector<std::string> items;
  int depth = 0;
  bool quoted = false;
  std::string cur;
  for (char ch : s) {
    if (ch == '"') quoted = !quoted;
    if (!quoted && (ch == '[' || ch == '(')) ++depth;
    if (!quoted && (ch == ']' || ch == ')')) --depth;
    if (ch == ',' && depth == 0 && !quoted) {
      items.push_back(boost::algorithm::trim_copy(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!boost::algorithm::trim_copy(cur).empty()) items.push_back(boost::algorithm::trim_copy(cur));
  return items;
}

// One [section] with key tracking, so unknown keys are reported.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree, const ParamSet& names, const ParamMap& params)
      : name_(std::move(name)), tree_(tree), names_(names), params_(params) {}

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    if (!tree_) return std::nullopt;
    used_.insert(key);
    auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return strip_comment(it->second.data());
  }

  std::optional<std::string> text(const std::string& key) {
    auto r = raw(key);
    if (!r) return std::nullopt;
    return unquote(*r);
  }

  std::optional<Expr> expr(const std::string& key) {
    auto t = text(key);
    if (!t) return std::nullopt;
    return parse(*t, names_);
  }

  double number_of(const std::string& item, const std::string& key) const {
    const Expr e = parse(unquote(item), names_);
    try {
      return evaluate(e, Point2::Zero(), 0.0, params_);
    } catch (const Error& err) {
      throw ConfigError(where(key) + ": " + err.what());
    }
  }

  std::optional<double> number(const std::string& key) {
    auto r = raw(key);
    if (!r) return std::nullopt;
    return number_of(*r, key);
  }

  std::optional<bool> boolean(const std::string& key) {
    auto t = text(key);
    if (!t) return std::nullopt;
    if (*t == "true") return true;
    if (*t == "false") return false;
    throw ConfigError(where(key) + ": expected true or false");
  }

  std::optional<std::uint64_t> integer(const std::string& key) {
    auto t = text(key);
    if (!t) return std::nullopt;
    try {
      std::size_t used = 0;
      const auto v = std::stoull(*t, &used);
      if (used != t->size() || t->front() == '-') throw std::invalid_argument(*t);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(where(key) + ": expected a non-negative integer, got '" + *t + "'");
    }
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    auto r = raw(key);
    if (!r) return std::nullopt;
    std::vector<double> out;
    for (const auto& item : split_list(*r, where(key))) out.push_back(number_of(item, key));
    return out;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    auto r = raw(key);
    if (!r) return std::nullopt;
    std::vector<std::string> out;
    for (const auto& item : split_list(*r, where(key))) out.push_back(unquote(item));
    return out;
  }

  std::optional<Point2> point(const std::string& key) {
    auto v = numbers(key);
    if (!v) return std::nullopt;
    if (v->size() != 2) throw ConfigError(where(key) + ": expected [x1, x2]");
    return Point2((*v)[0], (*v)[1]);
  }

  std::optional<std::vector<Point2>> points(const std::string& key) {
    auto r = raw(key);
    if (!r) return std::nullopt;
    std::vector<Point2> out;
    for (const auto& item : split_list(*r, where(key))) {
      std::vector<double> xy;
      for (const auto& c : split_list(item, where(key))) xy.push_back(number_of(c, key));
      if (xy.size() != 2) throw ConfigError(where(key) + ": expected a list of [x1, x2] pairs");
      out.emplace_back(xy[0], xy[1]);
    }
    return out;
  }

  std::optional<std::pair<double, double>> range(const std::string& key) {
    auto v = numbers(key);
    if (!v) return std::nullopt;
    if (v->size() != 2 || !((*v)[1] > (*v)[0])) throw ConfigError(where(key) + ": expected an ordered [lo, hi]");
    return std::pair((*v)[0], (*v)[1]);
  }

  std::optional<Matrix2Field> matrix(const std::string& key) {
    auto s = strings(key);
    if (!s) return std::nullopt;
    if (s->size() != 4) throw ConfigError(where(key) + ": expected four entries [b11, b12, b21, b22]");
    Matrix2Field m;
    for (int k = 0; k < 4; ++k) m.a[k] = parse((*s)[k], names_);
    return m;
  }

  std::string where(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  void check_unknown() const {
    if (!tree_) return;
    for (const auto& [k, v] : *tree_)
      if (!used_.contains(k)) throw ConfigError("unknown key '" + where(k) + "'");
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
  const ParamSet& names_;
  const ParamMap& params_;
  std::set<std::string> used_;
};

Grid2 read_grid(Section& s, Grid2 g, const std::string& prefix = "") {
  if (auto r = s.range(prefix + "x1")) g.x1_min = r->first, g.x1_max = r->second;
  if (auto r = s.range(prefix + "x2")) g.x2_min = r->first, g.x2_max = r->second;
  if (auto n = s.integer(prefix + "nx")) g.nx = static_cast<int>(*n);
  if (auto n = s.integer(prefix + "ny")) g.ny = static_cast<int>(*n);
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.where(prefix + "x1") + ": " + e.what());
  }
  return g;
}

Scheme read_scheme(const std::string& s) {
  if (s == "heun" || s == "stratonovich") return Scheme::HeunStratonovich;
  if (s == "euler" || s == "euler-maruyama") return Scheme::EulerMaruyama;
  throw ConfigError("simulate.scheme: expected heun or euler, got '" + s + "'");
}

AnsatzKind read_kind(const std::string& s) {
  if (s == "upper") return AnsatzKind::Upper;
  if (s == "lower") return AnsatzKind::Lower;
  throw ConfigError("orbits.ansatz: expected upper or lower, got '" + s + "'");
}

}  // namespace

SystemConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }

  SystemConfig c;
  const std::set<std::string> sections{"parameters", "field",   "window",   "mapping", "decompose",
                                       "hamiltonian", "orbits", "simulate", "fig2",    "output"};
  for (const auto& [k, v] : tree) {
    if (v.empty() && !sections.contains(k)) continue;
    if (!sections.contains(k)) throw ConfigError("unknown section [" + k + "]");
  }
  auto sub = [&](const std::string& name) -> const pt::ptree* {
    auto it = tree.find(name);
    return it == tree.not_found() || it->second.empty() ? nullptr : &it->second;
  };

  // Parameters may refer to pi and to each other in file order.
  ParamSet names;
  if (const auto* p = sub("parameters")) {
    for (const auto& [k, v] : *p) names.insert(k);
    for (const auto& [k, v] : *p) {
      const Expr e = parse(unquote(strip_comment(v.data())), names);
      try {
        c.parameters[k] = evaluate(e, Point2::Zero(), 0.0, c.parameters);
      } catch (const Error& err) {
        throw ConfigError("parameters." + k + ": " + err.what());
      }
    }
  }

  pt::ptree top;
  for (const auto& [k, v] : tree)
    if (v.empty() && !sections.contains(k)) top.push_back({k, v});
  Section root("", &top, names, c.parameters);
  if (auto v = root.text("name")) c.name = *v;
  if (auto v = root.strings("run")) c.run = *v;

  Section field("field", sub("field"), names, c.parameters);
  if (!field.present()) throw ConfigError("missing [field] section");
  auto u1 = field.expr("u1"), u2 = field.expr("u2");
  if (!u1 || !u2) throw ConfigError("field: both u1 and u2 are required");
  c.field = {*u1, *u2};
  field.check_unknown();

  Section window("window", sub("window"), names, c.parameters);
  c.window = read_grid(window, c.window);
  window.check_unknown();

  Section mapping("mapping", sub("mapping"), names, c.parameters);
  if (mapping.present()) {
    if (auto preset = mapping.text("preset")) {
      if (*preset == "polar") c.mapping = Mapping2::polar();
      else if (*preset == "identity") c.mapping = Mapping2::identity();
      else throw ConfigError("mapping.preset: expected polar or identity, got '" + *preset + "'");
    } else {
      auto f1 = mapping.expr("f1"), f2 = mapping.expr("f2");
      if (!f1 || !f2) throw ConfigError("mapping: give a preset or both f1 and f2");
      Mapping2 m;
      m.f1 = *f1;
      m.f2 = *f2;
      if (auto inv = mapping.strings("inverse")) {
        if (inv->size() != 2) throw ConfigError("mapping.inverse: expected [g1, g2]");
        m.inverse = std::array<Expr, 2>{parse((*inv)[0], names), parse((*inv)[1], names)};
      }
      m.note = "user mapping";
      c.mapping = m;
    }
    c.mapping->domain = read_grid(mapping, c.mapping->domain, "domain_");
    mapping.check_unknown();
  }

  Section dec("decompose", sub("decompose"), names, c.parameters);
  if (auto m = dec.text("method")) {
    if (*m == "lienard") c.decompose.method = DecomposeMethod::Lienard;
    else if (*m == "modal") c.decompose.method = DecomposeMethod::Modal;
    else if (*m == "numeric") c.decompose.method = DecomposeMethod::Numeric;
    else throw ConfigError("decompose.method: expected lienard, modal or numeric, got '" + *m + "'");
  }
  if (auto p = dec.expr("p")) c.decompose.lienard.p = *p;
  if (auto q = dec.strings("q"))
    for (const auto& s : *q) c.decompose.lienard.q.push_back(parse(s, names));
  if (auto f = dec.expr("forcing")) c.decompose.lienard.forcing = *f;
  if (auto g = dec.text("gauge")) {
    if (*g == "potential") c.decompose.lienard.gauge = ForcingGauge::Potential;
    else if (*g == "hamiltonian") c.decompose.lienard.gauge = ForcingGauge::Hamiltonian;
    else throw ConfigError("decompose.gauge: expected potential or hamiltonian");
  }
  if (auto g = dec.expr("Gamma")) c.decompose.modal.Gamma = *g;
  if (auto w = dec.expr("Omega")) c.decompose.modal.Omega = *w;
  if (auto b = dec.text("boundary")) {
    if (*b == "dirichlet") c.decompose.poisson.boundary = BoundaryConvention::PotentialDirichlet;
    else if (*b == "neumann") c.decompose.poisson.boundary = BoundaryConvention::PotentialNeumann;
    else throw ConfigError("decompose.boundary: expected dirichlet or neumann");
  }
  if (c.decompose.method == DecomposeMethod::Lienard && c.decompose.lienard.p.is_constant() &&
      !dec.raw("p"))
    throw ConfigError("decompose: method lienard needs p");
  if (c.decompose.method == DecomposeMethod::Modal && (!dec.raw("Gamma") || !dec.raw("Omega")))
    throw ConfigError("decompose: method modal needs Gamma and Omega");
  dec.check_unknown();

  Section ham("hamiltonian", sub("hamiltonian"), names, c.parameters);
  c.hamiltonian.alpha = ham.expr("alpha");
  c.hamiltonian.B = ham.matrix("B");
  c.hamiltonian.probe = c.window;
  c.hamiltonian.probe = read_grid(ham, c.hamiltonian.probe, "probe_");
  c.hamiltonian.basepoint = ham.point("basepoint");
  if (auto s = ham.points("starts")) c.hamiltonian.starts = *s;
  if (auto v = ham.number("t_end")) c.hamiltonian.t_end = *v;
  if (auto v = ham.number("dt")) c.hamiltonian.dt = *v;
  ham.check_unknown();

  Section orb("orbits", sub("orbits"), names, c.parameters);
  AnsatzSpec base;
  if (auto v = orb.expr("a")) base.a = *v;
  if (auto v = orb.number("b")) base.b = *v;
  if (auto v = orb.number("c")) base.c = *v;
  if (auto v = orb.expr("d")) base.d = *v;
  if (auto v = orb.number("C")) base.C = *v;
  for (const auto& k : orb.strings("ansatz").value_or(std::vector<std::string>{"upper", "lower"})) {
    AnsatzSpec s = base;
    s.kind = read_kind(k);
    c.orbits.ansatz.push_back(s);
  }
  if (auto s = orb.points("seeds")) c.orbits.seeds = *s;
  if (auto v = orb.number("tmax")) c.orbits.options.tmax = *v;
  if (auto v = orb.number("tol")) c.orbits.options.tol = *v;
  if (auto v = orb.number("settle")) c.orbits.options.settle = *v;
  orb.check_unknown();

  Section sim("simulate", sub("simulate"), names, c.parameters);
  auto& s = c.simulate;
  if (auto v = sim.point("x0")) s.x0 = *v;
  if (auto v = sim.matrix("B")) s.B = *v;
  if (auto v = sim.number("Gamma")) s.Gamma = *v;
  if (auto v = sim.number("dt")) s.dt = *v;
  if (auto v = sim.number("T")) s.T = *v;
  if (auto v = sim.number("record_dt")) s.record_dt = *v;
  if (auto v = sim.integer("ensemble_size")) s.ensemble_size = *v;
  if (auto v = sim.integer("seed")) s.seed = *v;
  if (auto v = sim.text("scheme")) s.scheme = read_scheme(*v);
  if (auto v = sim.boolean("transformed")) s.transformed = *v;
  if (auto v = sim.text("format")) {
    if (*v != "csv" && *v != "binary") throw ConfigError("simulate.format: expected csv or binary");
    s.binary = *v == "binary";
  }
  if (s.transformed && !c.mapping) throw ConfigError("simulate.transformed needs a [mapping] section");
  sim.check_unknown();

  Section fig("fig2", sub("fig2"), names, c.parameters);
  if (auto v = fig.numbers("J")) c.fig2.J = *v;
  if (auto v = fig.numbers("K")) c.fig2.K = *v;
  if (auto v = fig.integer("n")) c.fig2.n = static_cast<int>(*v);
  if (auto v = fig.numbers("levels")) c.fig2.levels = *v;
  for (double J : c.fig2.J)
    if (!(J > 0)) throw ConfigError("fig2.J: values must be positive");
  if (c.fig2.n < 4) throw ConfigError("fig2.n: need at least 4 nodes");
  fig.check_unknown();

  Section out("output", sub("output"), names, c.parameters);
  if (auto v = out.text("dir")) c.out_dir = *v;
  out.check_unknown();

  root.check_unknown();
  return c;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

}  // namespace planar
