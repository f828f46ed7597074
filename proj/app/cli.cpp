#include "cli.hpp"

#include "planar/config.hpp"
#include "planar/errors.hpp"
#include "planar/figures.hpp"
#include "planar/hamiltonian.hpp"
#include "planar/ode.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace planar {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json expr_list(const std::vector<Expr>& es) {
  json j = json::array();
  for (const auto& e : es) j.push_back(to_string(e));
  return j;
}

json matrix_json(const Matrix2Field& m) {
  return json::array({to_string(m.a[0]), to_string(m.a[1]), to_string(m.a[2]), to_string(m.a[3])});
}

json point_json(const Point2& p) { return json::array({p.x(), p.y()}); }

std::string number_text(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::pair<int, int>> grid;
};

class Run {
 public:
  Run(SystemConfig cfg, const Options& opts, std::ostream& log) : cfg_(std::move(cfg)), log_(log) {
    if (opts.grid) cfg_.window.nx = opts.grid->first, cfg_.window.ny = opts.grid->second;
    if (opts.grid) cfg_.hamiltonian.probe.nx = opts.grid->first, cfg_.hamiltonian.probe.ny = opts.grid->second;
    if (opts.grid) cfg_.fig2.n = opts.grid->first;
    if (opts.seed) cfg_.simulate.seed = *opts.seed;
    tol_ = opts.tol;
    if (opts.tol) cfg_.orbits.options.tol = *opts.tol;
    out_ = opts.out.empty() ? cfg_.out_dir : fs::path(opts.out);
    field_ = cfg_.field.bound(cfg_.parameters).simplified();
  }

  const SystemConfig& cfg() const { return cfg_; }
  SystemConfig& cfg() { return cfg_; }
  const VectorField2& field() const { return field_; }
  const ParamMap& params() const { return cfg_.parameters; }
  std::optional<double> tol() const { return tol_; }
  Expr bound(const Expr& e) const { return simplify(bind(e, cfg_.parameters)); }

  // Temp file plus rename, so readers never see a partial file.
  void write(const std::string& name, const std::string& content) {
    fs::create_directories(out_);
    const fs::path target = out_ / name;
    const fs::path tmp = out_ / (name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw std::runtime_error("cannot write " + tmp.string());
      f << content;
      f.flush();
      if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
    log_ << target.string() << '\n';
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

 private:
  SystemConfig cfg_;
  std::ostream& log_;
  fs::path out_;
  VectorField2 field_;
  std::optional<double> tol_;
};

bool same_field(const VectorField2& a, const VectorField2& b, const Grid2& window, const ParamMap& params) {
  Grid2 probe = window;
  probe.nx = probe.ny = 24;
  ZeroTestOptions opts;
  opts.params = &params;
  return is_identically_zero(a.u1 - b.u1, probe, opts).zero && is_identically_zero(a.u2 - b.u2, probe, opts).zero;
}

json basis_json(const HelmholtzPair& hd) {
  if (hd.cartesian()) return "cartesian";
  const auto& c = std::get<Curvilinear>(hd.basis);
  return {{"g", matrix_json(c.g)}, {"sqrt_detg", to_string(c.sqrt_detg)}, {"detQ", c.detQ}};
}

std::optional<HelmholtzPair> symbolic_pair(const SystemConfig& c) {
  switch (c.decompose.method) {
    case DecomposeMethod::Lienard:
      return lienard_decompose(c.decompose.lienard);
    case DecomposeMethod::Modal:
      return modal_decompose(c.decompose.modal);
    case DecomposeMethod::Numeric:
      break;
  }
  return std::nullopt;
}

void cmd_decompose(Run& r) {
  const auto& c = r.cfg();
  json j{{"system", c.name}, {"parameters", c.parameters}};
  if (auto hd = symbolic_pair(c)) {
    j["method"] = c.decompose.method == DecomposeMethod::Lienard ? "lienard" : "modal";
    j["V"] = to_string(hd->V);
    j["H"] = to_string(hd->H);
    j["basis"] = basis_json(*hd);
    const VectorField2 back = reconstruct(*hd);
    j["reconstructed"] = {{"u1", to_string(back.u1)}, {"u2", to_string(back.u2)}};
    j["matches_field"] = same_field(back, c.field, c.window, c.parameters);
    r.write_json("decompose.json", j);
    return;
  }
  const GridField g = sample(r.field(), c.window, 0.0);
  const NumericDecomposition d = numeric_decompose(g, c.decompose.poisson);
  const GridField back = reconstruct_grid(c.window, d.V, d.H);
  double err = 0, scale = 0;
  for (int i = 1; i + 1 < c.window.nx; ++i)
    for (int k = 1; k + 1 < c.window.ny; ++k) {
      err = std::max({err, std::abs(back.u1(i, k) - g.u1(i, k)), std::abs(back.u2(i, k) - g.u2(i, k))});
      scale = std::max({scale, std::abs(g.u1(i, k)), std::abs(g.u2(i, k))});
    }
  std::ostringstream csv;
  csv << "x1,x2,V,H\n";
  for (int k = 0; k < c.window.ny; ++k)
    for (int i = 0; i < c.window.nx; ++i)
      csv << number_text(c.window.x1(i)) << ',' << number_text(c.window.x2(k)) << ',' << number_text(d.V(i, k))
          << ',' << number_text(d.H(i, k)) << '\n';
  j["method"] = "numeric";
  j["boundary"] = d.boundary == BoundaryConvention::PotentialDirichlet ? "dirichlet" : "neumann";
  j["residual_V"] = d.residual_V;
  j["residual_H"] = d.residual_H;
  j["interior_reconstruction_error"] = err;
  j["field_scale"] = scale;
  j["grid_file"] = "decompose_grid.csv";
  r.write("decompose_grid.csv", csv.str());
  r.write_json("decompose.json", j);
}

void cmd_transform(Run& r) {
  const auto& c = r.cfg();
  if (!c.mapping) throw ConfigError("transform needs a [mapping] section");
  Mapping2 f = *c.mapping;
  f.f1 = r.bound(f.f1);
  f.f2 = r.bound(f.f2);
  const Metric m = metric_tensor(f);
  json j{{"system", c.name},
         {"mapping", {{"f1", to_string(f.f1)}, {"f2", to_string(f.f2)}, {"note", f.note}}},
         {"jacobian", matrix_json(jacobian(f))},
         {"metric", {{"g", matrix_json(m.g)}, {"detg", to_string(m.detg)}}},
         {"jacobian_sign", jacobian_sign(f, c.parameters)}};
  const auto polar = symbolic_polar(f, c.parameters);
  if (polar) {
    j["polar"] = {{"Q", matrix_json(polar->Q)}, {"h", matrix_json(polar->h)}, {"detQ", polar->detQ}};
    j["noise"] = {{"Q_transpose", matrix_json(polar->Q.transpose())},
                  {"h_inverse", matrix_json(inverse(polar->h).simplified())}};
  } else {
    j["polar"] = nullptr;
  }
  // h is the symmetric polar factor, so h^-1 is lower triangular only where h is diagonal.
  {
    const Matrix2Field Jf = jacobian(f);
    double off = 0, scale = 0;
    Grid2 probe = f.domain;
    probe.nx = probe.ny = 32;
    for (int i = 0; i < probe.nx; ++i)
      for (int k = 0; k < probe.ny; ++k) {
        const Matrix2d h = polar_decompose<double>(Jf(probe.point(i, k), 0.0, c.parameters)).h;
        off = std::max(off, std::abs(h(0, 1)));
        scale = std::max(scale, h.cwiseAbs().maxCoeff());
      }
    j["h_triangularity"] = {{"max_offdiagonal", off}, {"lower_triangular", off <= 1e-12 * std::max(scale, 1.0)}};
  }
  const VectorField2 pushed = pushforward(r.field(), f, c.parameters).simplified();
  j["field"] = {{"u1", to_string(pushed.u1)}, {"u2", to_string(pushed.u2)}};

  auto hd = symbolic_pair(c);
  if (hd && hd->cartesian()) {
    hd->V = r.bound(hd->V);
    hd->H = r.bound(hd->H);
    const HelmholtzPair tp = transform_pair(*hd, f, c.parameters);
    const VectorField2 ts = transform_system(*hd, f, c.parameters);
    double dev = 0;
    const Grid2& d = f.domain;
    for (int i = 0; i < d.nx; ++i)
      for (int k = 0; k < d.ny; ++k)
        for (double t : {0.0, 0.37}) {
          const Point2 y = d.point(i, k);
          dev = std::max(dev, (ts(y, t, c.parameters) - pushed(y, t, c.parameters)).cwiseAbs().maxCoeff());
        }
    j["pair"] = {{"V", to_string(tp.V)}, {"H", to_string(tp.H)}, {"basis", basis_json(tp)}};
    j["system"] = {{"u1", to_string(ts.u1)}, {"u2", to_string(ts.u2)}};
    j["max_deviation"] = dev;
  } else {
    j["pair"] = nullptr;
  }
  r.write_json("transform.json", j);
}

void cmd_check_hamiltonian(Run& r) {
  const auto& c = r.cfg();
  CriterionOptions opts;
  opts.params = c.parameters;
  if (r.tol()) opts.tol = *r.tol();
  json j{{"system", c.name}};
  const Grid2& probe = c.hamiltonian.probe;

  std::optional<Expr> alpha;
  if (c.hamiltonian.alpha) {
    alpha = r.bound(*c.hamiltonian.alpha);
    j["alpha_source"] = "config";
  } else {
    alpha = find_monomial_alpha(r.field(), probe, 2, opts);
    j["alpha_source"] = alpha ? "monomial search" : "none found";
  }
  std::optional<CriterionReport> rep;
  if (alpha) {
    rep = check_criterion_I(r.field(), *alpha, probe, opts);
    j["criterion_I"] = json::parse(to_json(*rep));
  } else {
    j["criterion_I"] = nullptr;
  }
  if (c.hamiltonian.B) {
    Matrix2Field B = *c.hamiltonian.B;
    for (auto& e : B.a) e = r.bound(e);
    j["criterion_II"] = json::parse(to_json(check_criterion_II(r.field(), B, probe, opts)));
  }
  j["verdict"] = rep ? to_string(rep->verdict) : to_string(Verdict::Inconclusive);

  if (rep && rep->verdict == Verdict::Hamiltonian && c.hamiltonian.basepoint) {
    const HamiltonianRecovery rec = recover_hamiltonian(r.field(), *alpha, *c.hamiltonian.basepoint, probe);
    j["recovery"] = json::parse(to_json(rec));
    json runs = json::array();
    const CompiledField2 F(r.field());
    for (const Point2& x0 : c.hamiltonian.starts) {
      json run{{"start", point_json(x0)}, {"t_end", c.hamiltonian.t_end}, {"dt", c.hamiltonian.dt}};
      try {
        const Trajectory tr = integrate_rk4(F, x0, 0.0, c.hamiltonian.t_end, c.hamiltonian.dt, 100);
        const double h0 = rec(x0);
        double drift = 0;
        for (const Point2& x : tr.x) drift = std::max(drift, std::abs(rec(x) - h0));
        run["H0"] = h0;
        run["drift"] = drift;
        run["relative_drift"] = drift / std::max(std::abs(h0), 1.0);
      } catch (const Error& e) {
        run["error"] = e.kind() + ": " + e.what();
      }
      runs.push_back(run);
    }
    j["conservation"] = runs;
  }
  r.write_json("hamiltonian.json", j);
}

AnsatzSpec bound_spec(const Run& r, AnsatzSpec s) {
  s.a = r.bound(s.a);
  s.d = r.bound(s.d);
  return s;
}

std::vector<AnsatzSpec> ansatz_list(const Run& r) {
  std::vector<AnsatzSpec> out;
  for (const auto& s : r.cfg().orbits.ansatz) out.push_back(bound_spec(r, s));
  return out;
}

void cmd_exclude_orbits(Run& r) {
  const auto& c = r.cfg();
  std::vector<NamedPolyline> lines;
  const std::vector<AnsatzSpec> specs = ansatz_list(r);
  std::size_t degenerate = 0;
  for (const AnsatzSpec& spec : specs) {
    const std::string kind = to_string(spec.kind);
    ExclusionReport rep;
    try {
      rep = exclusion_report(r.field(), spec, c.window);
    } catch (const DegenerateODE& e) {
      // This ansatz says nothing; the others may still.
      if (++degenerate == specs.size()) throw;
      r.write_json("exclusion_" + kind + ".json",
                   {{"ansatz", kind}, {"error", e.kind()}, {"message", e.what()}, {"curves", json::array()}});
      continue;
    }
    r.write("exclusion_" + kind + ".json", to_json(rep) + "\n");
    for (auto& l : curve_polylines(rep.curves, c.window)) lines.push_back({kind + ": " + l.name + " = 0", l.line});
  }
  std::ostringstream csv;
  write_polylines_csv(csv, lines);
  r.write("curves.csv", csv.str());
}

// Singular curves of each ansatz, for crossing counts.
std::map<std::string, std::vector<Expr>> ansatz_curves(const Run& r) {
  std::map<std::string, std::vector<Expr>> out;
  for (const AnsatzSpec& spec : ansatz_list(r)) {
    Grid2 coarse = r.cfg().window;
    coarse.nx = coarse.ny = 8;
    try {
      out[to_string(spec.kind)] = solve_N(r.field(), spec, coarse).singular_curves;
    } catch (const DegenerateODE&) {
      out[to_string(spec.kind)] = {};
    }
  }
  return out;
}

struct OrbitRun {
  std::vector<OrbitSearchResult> results;
  std::map<std::string, std::vector<Expr>> curves;
};

OrbitRun search_orbits(const Run& r) {
  const auto& c = r.cfg();
  if (c.orbits.seeds.empty()) throw ConfigError("orbits.seeds is empty");
  if (!r.field().autonomous()) throw ConfigError("closed-orbit search needs an autonomous field");
  OrbitRun o;
  o.results = find_closed_orbits(r.field(), c.orbits.seeds, c.orbits.options);
  o.curves = ansatz_curves(r);
  for (auto& res : o.results)
    if (res.orbit) {
      res.orbit->crossings.clear();
      for (const auto& [kind, curves] : o.curves) {
        const auto k = verify_crossings(*res.orbit, curves);
        res.orbit->crossings.insert(res.orbit->crossings.end(), k.begin(), k.end());
      }
    }
  return o;
}

json orbit_summary(const OrbitRun& o) {
  json j = json::parse(to_json(o.results));
  json families = json::object();
  for (const auto& [kind, curves] : o.curves) families[kind] = expr_list(curves);
  return {{"orbits", j}, {"curve_families", families}};
}

std::vector<NamedPolyline> orbit_lines(const OrbitRun& o) {
  std::vector<NamedPolyline> lines;
  for (std::size_t k = 0; k < o.results.size(); ++k)
    if (o.results[k].orbit) lines.push_back({"orbit " + std::to_string(k), {o.results[k].orbit->orbit, true}});
  return lines;
}

void cmd_find_orbits(Run& r) {
  const OrbitRun o = search_orbits(r);
  json j = orbit_summary(o);
  j["system"] = r.cfg().name;
  r.write_json("orbits.json", j);
  std::ostringstream csv;
  write_polylines_csv(csv, orbit_lines(o));
  r.write("orbits.csv", csv.str());
}

void cmd_fig3(Run& r) {
  const auto& c = r.cfg();
  const OrbitRun o = search_orbits(r);
  std::vector<NamedPolyline> lines;
  for (const auto& [kind, curves] : o.curves)
    for (auto& l : curve_polylines(curves, c.window)) lines.push_back({kind + ": " + l.name + " = 0", l.line});
  for (auto& l : orbit_lines(o)) lines.push_back(l);
  json j = orbit_summary(o);
  j["system"] = c.name;
  j["parameters"] = c.parameters;
  j["window"] = {{"x1", {c.window.x1_min, c.window.x1_max}}, {"x2", {c.window.x2_min, c.window.x2_max}}};
  std::ostringstream csv;
  write_polylines_csv(csv, lines);
  r.write("fig3_" + c.name + ".csv", csv.str());
  r.write_json("fig3_" + c.name + ".json", j);
}

json stats_summary(const Ensemble& e, double t) {
  json j{{"t", t}, {"members", e.members}, {"healthy", e.healthy()}};
  if (e.healthy() < 2) {
    json finals = json::array();
    for (std::size_t m = 0; m < e.members; ++m) finals.push_back(point_json(e.at(e.time_index(t), m)));
    j["final_states"] = finals;
    return j;
  }
  const StatsReport s = compare_stats(e, e, t);
  j["mean"] = point_json(s.mean1);
  j["cov"] = {{s.cov1(0, 0), s.cov1(0, 1)}, {s.cov1(1, 0), s.cov1(1, 1)}};
  return j;
}

void write_ensemble(Run& r, const std::string& stem, const Ensemble& e) {
  std::ostringstream out;
  if (r.cfg().simulate.binary) {
    write_binary(out, e);
    r.write(stem + ".pfl", out.str());
  } else {
    write_csv(out, e);
    r.write(stem + ".csv", out.str());
  }
}

void cmd_simulate(Run& r) {
  const auto& c = r.cfg();
  const auto& s = c.simulate;
  LangevinSpec spec;
  spec.F = r.field();
  spec.B = s.B;
  for (auto& e : spec.B.a) e = r.bound(e);
  spec.Gamma = s.Gamma;
  spec.dt = s.dt;
  spec.T = s.T;
  spec.record_dt = s.record_dt;
  spec.ensemble_size = s.ensemble_size;
  spec.seed = s.seed;
  spec.scheme = s.scheme;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("simulate: ") + e.what());
  }
  const Ensemble cart = simulate(spec, s.x0);
  write_ensemble(r, "ensemble", cart);
  json j{{"system", c.name},
         {"seed", s.seed},
         {"scheme", s.scheme == Scheme::HeunStratonovich ? "heun" : "euler"},
         {"cartesian", stats_summary(cart, spec.T)}};
  if (s.transformed) {
    Mapping2 f = *c.mapping;
    f.f1 = r.bound(f.f1);
    f.f2 = r.bound(f.f2);
    LangevinSpec tspec = transform_spec(spec, f);
    tspec.seed = spec.seed + 1;
    tspec.scheme = Scheme::HeunStratonovich;
    const Ensemble direct = simulate(tspec, f.invert(s.x0));
    const Ensemble mapped = map_ensemble(cart, f, MapDirection::Inverse);
    write_ensemble(r, "ensemble_transformed", direct);
    j["transformed"] = {{"drift", {to_string(tspec.F.u1), to_string(tspec.F.u2)}},
                        {"diffusion", matrix_json(tspec.B)},
                        {"seed", tspec.seed}};
    j["comparison"] = json::parse(to_json(compare_stats(mapped, direct, spec.T)));
  }
  r.write_json("simulate.json", j);
}

void cmd_fig2(Run& r, const std::vector<double>& J, const std::vector<double>& K) {
  const auto& f = r.cfg().fig2;
  json panels = json::array();
  for (std::size_t a = 0; a < J.size(); ++a)
    for (std::size_t b = 0; b < K.size(); ++b) {
      if (!(J[a] > 0)) throw ConfigError("fig2: J must be positive");
      const Fig2Panel p = fig2_panel(J[a], K[b], f.n, f.levels);
      const std::string name = "fig2_" + std::to_string(a) + "_" + std::to_string(b) + ".csv";
      std::ostringstream csv;
      csv << "x1,x2,value,clipped\n";
      for (int k = 0; k < p.grid.ny; ++k)
        for (int i = 0; i < p.grid.nx; ++i)
          csv << number_text(p.grid.x1(i)) << ',' << number_text(p.grid.x2(k)) << ',' << number_text(p.value(i, k))
              << ',' << (p.clipped(i, k) ? 1 : 0) << '\n';
      r.write(name, csv.str());
      panels.push_back({{"J", p.J},
                        {"K", p.K},
                        {"file", name},
                        {"n", f.n},
                        {"clipped_nodes", p.clipped.count()},
                        {"levels", p.levels},
                        {"closed_levels", p.closed_levels},
                        {"closed", !p.closed_levels.empty()}});
    }
  r.write_json("fig2.json", {{"domain", {-std::numbers::pi, std::numbers::pi}}, {"panels", panels}});
}

std::optional<std::pair<int, int>> parse_grid(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto comma = s.find(',');
  auto to_int = [&](std::string_view v) {
    int n = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc() || p != v.data() + v.size() || n < 2) throw ConfigError("--grid: expected NX,NY with NX, NY >= 2");
    return n;
  };
  if (comma == std::string::npos) throw ConfigError("--grid: expected NX,NY");
  const std::string_view v(s);
  return std::pair(to_int(v.substr(0, comma)), to_int(v.substr(comma + 1)));
}

void dispatch(Run& r, const std::string& command) {
  if (command == "decompose") cmd_decompose(r);
  else if (command == "transform") cmd_transform(r);
  else if (command == "check-hamiltonian") cmd_check_hamiltonian(r);
  else if (command == "exclude-orbits") cmd_exclude_orbits(r);
  else if (command == "find-orbits") cmd_find_orbits(r);
  else if (command == "simulate") cmd_simulate(r);
  else if (command == "fig3") cmd_fig3(r);
  else if (command == "fig2") cmd_fig2(r, r.cfg().fig2.J, r.cfg().fig2.K);
  else throw ConfigError("unknown command '" + command + "' in run list");
}

void report(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planar dynamical systems: Helmholtz decomposition, hidden Hamiltonians, closed-orbit exclusion"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opts;
  std::string grid;
  app.add_option("--config", opts.config, "TOML-style run configuration");
  app.add_option("--out", opts.out, "output directory");
  app.add_option("--seed", opts.seed, "noise seed for simulate");
  app.add_option("--tol", opts.tol, "tolerance for criteria and orbit closure");
  app.add_option("--grid", grid, "grid nodes NX,NY");

  const std::vector<std::pair<std::string, std::string>> config_commands{
      {"decompose", "Helmholtz decomposition of the configured field"},
      {"transform", "field, metric and decomposition in mapped coordinates"},
      {"check-hamiltonian", "criteria I/II and recovery of the conserved quantity"},
      {"exclude-orbits", "regions free of closed orbits from the triangular ansatz"},
      {"find-orbits", "closed orbits through the configured seeds"},
      {"simulate", "Langevin ensembles and moment comparison"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : config_commands) subs[name] = app.add_subcommand(name, help);

  auto* fig2 = app.add_subcommand("fig2", "grids of -|H~| for the Kuramoto pair");
  std::vector<double> J, K;
  fig2->add_option("--J", J, "coupling values J > 0")->delimiter(',');
  fig2->add_option("--K", K, "coupling values K")->delimiter(',');

  auto* fig3 = app.add_subcommand("fig3", "singular curves and closed orbits");
  std::string fig3_example;
  std::optional<double> fig3_alpha;
  fig3->add_option("example", fig3_example, "harmonic, vanderpol or duffing");
  fig3->add_option("--alpha", fig3_alpha, "Van der Pol damping");

  auto* example = app.add_subcommand("example", "run a built-in system end to end");
  std::string example_id;
  example->add_option("id", example_id, "example id")->required()->check(CLI::IsMember(example_ids()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    report(err, "UsageError", e.what());
    return 2;
  }

  try {
    opts.grid = parse_grid(grid);
    auto need_config = [&]() {
      if (opts.config.empty()) throw ConfigError("--config is required for this command");
      return load_config(opts.config);
    };
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) {
        Run r(need_config(), opts, out);
        dispatch(r, name);
      }
    if (fig2->parsed()) {
      SystemConfig cfg = opts.config.empty() ? example_config("kuramoto_pair") : load_config(opts.config);
      Run r(std::move(cfg), opts, out);
      cmd_fig2(r, J.empty() ? r.cfg().fig2.J : J, K.empty() ? r.cfg().fig2.K : K);
    }
    if (fig3->parsed()) {
      SystemConfig cfg;
      if (!fig3_example.empty()) cfg = example_config(fig3_example);
      else cfg = need_config();
      if (fig3_alpha) {
        if (!cfg.parameters.contains("alpha")) throw ConfigError("--alpha: the system has no parameter alpha");
        cfg.parameters["alpha"] = *fig3_alpha;
      }
      Run r(std::move(cfg), opts, out);
      cmd_fig3(r);
    }
    if (example->parsed()) {
      Options o = opts;
      if (o.out.empty()) o.out = (fs::path("out") / example_id).string();
      Run r(example_config(example_id), o, out);
      r.write("config.toml", example_config_text(example_id));
      for (const auto& command : r.cfg().run) dispatch(r, command);
    }
  } catch (const ConfigError& e) {
    report(err, e.kind(), e.what());
    return 2;
  } catch (const SyntaxError& e) {
    report(err, e.kind(), e.what());
    return 2;
  } catch (const UnknownIdentifier& e) {
    report(err, e.kind(), e.what());
    return 2;
  } catch (const Error& e) {
    report(err, e.kind(), e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    report(err, "InvalidArgument", e.what());
    return 2;
  } catch (const std::exception& e) {
    report(err, "Failure", e.what());
    return 3;
  }
  return 0;
}

}  // namespace planar
