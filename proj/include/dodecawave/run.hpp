#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "evolution.hpp"
#include "format.hpp"
#include "locate.hpp"
#include "mesh.hpp"

namespace dodecawave {

inline const std::set<std::string> kRunKeys = {"model",    "H",         "t_star",     "t_end",    "dt",
                                               "level",    "mesh",      "init",       "constant", "constant_velocity",
                                               "bump_count", "seed",    "start",      "log_every", "output",
                                               "cg_tol",   "cfl_check"};
inline const std::set<std::string> kRunRepeatable = {"bump", "velocity_bump", "probe", "snapshot"};

inline ScaleFactorModel model_from_config(const KeyValueConfig& cfg) {
  const std::string name = cfg.get("model");
  if (name == "desitter") return ScaleFactorModel::de_sitter(cfg.number("H", 1.0));
  if (name == "inflating") {
    if (cfg.has("H")) throw UsageError("key 'H' applies to the desitter model only");
    return ScaleFactorModel::inflating();
  }
  throw UsageError("model must be 'desitter' or 'inflating', got '" + name + "'");
}

// Mesh from 'mesh = path' or 'level = L' (default 1).
inline TetMeshP2 mesh_from_config(const KeyValueConfig& cfg) {
  if (cfg.has("mesh")) {
    if (cfg.has("level")) throw UsageError("give either 'mesh' or 'level', not both");
    return read_mesh(cfg.get("mesh"));
  }
  return build_mesh(static_cast<int>(cfg.integer("level", 1)));
}

inline Bump parse_bump(const KeyValueConfig& cfg, const std::string& key, const std::string& text) {
  auto v = cfg.numbers(key, text, 5);
  return {{v[0], v[1], v[2]}, v[3], v[4]};
}

struct InitialData {
  Vector u0, u1;
  std::vector<Bump> bumps;  // position bumps actually used
  std::optional<std::uint64_t> seed;
};

// init = bumps (default) | init1 | init2 | init4 | constant | zero. Extra 'bump' lines are added to
// any preset; 'velocity_bump' and 'constant_velocity' set u1.
inline InitialData initial_data_from_config(const KeyValueConfig& cfg, const TetMeshP2& mesh) {
  InitialData d;
  const std::string init = cfg.get("init", "bumps");
  const std::size_t n = mesh.n_classes();
  double constant = 0;
  if (init == "init1") {
    d.bumps.push_back({{0, 0, 0}, 0.1, 100.0});
  } else if (init == "init2") {
    d.bumps.push_back({{0, 0, 0}, 0.05, 100.0});
  } else if (init == "init4") {
    d.seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));
    d.bumps = random_bumps(static_cast<int>(cfg.integer("bump_count", 100)), *d.seed);
  } else if (init == "constant") {
    constant = cfg.number("constant");
  } else if (init != "bumps" && init != "zero") {
    throw UsageError("unknown init '" + init + "'");
  }
  if (init != "constant" && cfg.has("constant")) throw UsageError("key 'constant' needs init = constant");
  for (const auto& line : cfg.all("bump")) d.bumps.push_back(parse_bump(cfg, "bump", line));
  d.u0 = d.bumps.empty() ? Vector(n, 0.0) : init_bump(mesh, d.bumps);
  for (auto& v : d.u0) v += constant;
  std::vector<Bump> vel;
  for (const auto& line : cfg.all("velocity_bump")) vel.push_back(parse_bump(cfg, "velocity_bump", line));
  d.u1 = vel.empty() ? Vector(n, 0.0) : init_bump(mesh, vel);
  double cv = cfg.number("constant_velocity", 0.0);
  for (auto& v : d.u1) v += cv;
  return d;
}

// Largest dt accepted for a run starting at t*: the CFL-style bound 0.5 h a(t*) and 0.9 of the
// measured leapfrog stability limit, whichever is smaller. Both named models have a increasing
// for t >= 0, so t* is the worst time.
inline double dt_cap(const TetMeshP2& mesh, const SystemMatrices& mats, const ScaleFactorModel& model, double t_star) {
  return std::min(0.5 * mesh.max_edge_length() * model.a(t_star), 0.9 * stable_dt(mats, model, t_star));
}

// Precomputed P2 evaluation at a fixed point of the ball (reduced to F_v first).
struct Probe {
  Vec3 position;
  std::array<int, 10> classes{};
  std::array<double, 10> weights{};

  Probe(const TetMeshP2& mesh, const PointLocator& locator, const Vec3& X) : position(X) {
    Vec3 r = project(reduce_to_domain(lift(X)).point);
    TetLocation loc = locator.locate(r);
    auto phi = shape_values(loc.bary);
    auto cls = mesh.tet_classes(loc.tet);
    for (int k = 0; k < 10; ++k) {
      classes[k] = cls[k];
      weights[k] = phi[k];
    }
  }
  double operator()(const Vector& U) const {
    double v = 0;
    for (int k = 0; k < 10; ++k) v += weights[k] * U[classes[k]];
    return v;
  }
};

struct LogRow {
  double t, energy, norm;
  std::vector<double> probes;
};

struct RunOptions {
  double t_end = 0;
  long log_every = 1;
  std::vector<Vec3> probes;
  std::vector<double> snapshots;
  bool norm = true;
};

struct RunObserver {
  std::function<void(const LogRow&)> on_log;
  std::function<void(double requested, double t, const Vector&)> on_snapshot;
};

// Advances an already started evolution to t_end, logging every log_every levels (including
// the first level U^1) and the last one.
inline void simulate(Evolution& evo, const TetMeshP2& mesh, const RunOptions& opt, const RunObserver& obs) {
  if (!(opt.t_end > evo.t_star())) throw UsageError("t_end must exceed t_star");
  if (opt.log_every < 1) throw UsageError("log_every must be at least 1");
  PointLocator locator(mesh);
  std::vector<Probe> probes;
  for (const auto& p : opt.probes) probes.emplace_back(mesh, locator, p);
  const double dt = evo.dt();
  const long last = std::lround(std::ceil((opt.t_end - evo.t_star()) / dt - 1e-9));
  std::vector<double> pending = opt.snapshots;
  std::sort(pending.begin(), pending.end());
  std::size_t next_snap = 0;
  // U^0 is the state at t*.
  while (next_snap < pending.size() && pending[next_snap] <= evo.t_star() + 0.5 * dt) {
    if (obs.on_snapshot) obs.on_snapshot(pending[next_snap], evo.t_star(), evo.previous());
    ++next_snap;
  }
  auto log = [&] {
    if (!obs.on_log) return;
    LogRow row{evo.time(), evo.energy(), opt.norm ? evo.norm_diagnostic() : 0.0, {}};
    for (const auto& p : probes) row.probes.push_back(p(evo.current()));
    obs.on_log(row);
  };
  for (long n = 1;; ++n) {
    if (n > 1) evo.step();
    while (next_snap < pending.size() && pending[next_snap] <= evo.time() + 0.5 * dt) {
      if (obs.on_snapshot) obs.on_snapshot(pending[next_snap], evo.time(), evo.current());
      ++next_snap;
    }
    if ((n - 1) % opt.log_every == 0 || n >= last) log();
    if (n >= last) break;
  }
}

inline std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "state_t%.6g.tsv", t);
  return buf;
}

inline void write_state(const Vector& U, std::ostream& os) {
  os << "class_id\tvalue\n";
  for (std::size_t i = 0; i < U.size(); ++i) os << i << '\t' << fmt17(U[i]) << '\n';
}

inline Vector read_state(const std::string& path, std::size_t n_classes) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  Vector U(n_classes, 0.0);
  std::vector<char> seen(n_classes, 0);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.rfind("class_id", 0) == 0) continue;
    std::istringstream in(line);
    long id;
    double v;
    if (!(in >> id >> v)) throw ParseError("expected 'class_id value'", lineno);
    if (id < 0 || static_cast<std::size_t>(id) >= n_classes) throw ParseError("class id out of range", lineno);
    U[id] = v;
    seen[id] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw ParseError("state file " + path + " does not cover every class", 0);
  return U;
}

struct RunSummary {
  long steps = 0;
  double t_final = 0, energy_final = 0;
  std::vector<std::string> files;
};

// Full 'run' subcommand: builds everything from the config and writes the logs into 'output'.
inline RunSummary run_from_config(const KeyValueConfig& cfg, std::ostream* progress = nullptr) {
  ScaleFactorModel model = model_from_config(cfg);
  const double t_star = cfg.number("t_star"), t_end = cfg.number("t_end"), dt = cfg.number("dt");
  const std::string out_dir = cfg.get("output");
  const std::string start = cfg.get("start", "first");
  if (start != "first" && start != "second") throw UsageError("start must be 'first' or 'second'");
  RunOptions opt;
  opt.t_end = t_end;
  opt.log_every = cfg.integer("log_every", 100);
  for (const auto& line : cfg.all("probe")) {
    auto v = cfg.numbers("probe", line, 3);
    opt.probes.push_back({v[0], v[1], v[2]});
  }
  for (const auto& line : cfg.all("snapshot")) opt.snapshots.push_back(KeyValueConfig::to_double("snapshot", line));
  if (!(t_end > t_star)) throw UsageError("t_end must exceed t_star");

  TetMeshP2 mesh = mesh_from_config(cfg);
  SystemMatrices mats = assemble(mesh);
  InitialData init = initial_data_from_config(cfg, mesh);
  if (cfg.get("cfl_check", "on") != "off") {
    double cap = dt_cap(mesh, mats, model, t_star);
    if (dt > cap) throw UsageError("dt = " + fmt17(dt) + " exceeds the stability cap " + fmt17(cap));
  }
  SolverOptions sopt;
  sopt.cg_tol = cfg.number("cg_tol", sopt.cg_tol);
  Evolution evo(mesh, mats, model, t_star, dt, sopt);
  evo.start(init.u0, init.u1, start == "second");

  std::filesystem::create_directories(out_dir);
  std::ostringstream header;
  header << "# model " << model.name();
  if (model.kind == ModelKind::de_sitter) header << " H " << fmt17(model.H);
  header << " level " << mesh.level << " t_star " << fmt17(t_star) << " dt " << fmt17(dt);
  if (init.seed) header << " seed " << *init.seed;
  header << '\n';

  RunSummary summary;
  auto open = [&](const std::string& name) {
    auto path = (std::filesystem::path(out_dir) / name).string();
    auto os = std::make_unique<std::ofstream>(path);
    if (!*os) throw std::runtime_error("cannot open " + path + " for writing");
    summary.files.push_back(path);
    return os;
  };
  auto energy = open("energy.tsv");
  auto norm = open("norm.tsv");
  *energy << header.str() << "t\tE_d\n";
  *norm << header.str() << "t\tNorm\n";
  std::vector<std::unique_ptr<std::ofstream>> probes;
  for (std::size_t k = 0; k < opt.probes.size(); ++k) {
    probes.push_back(open("probe_" + std::to_string(k) + ".tsv"));
    const auto& p = opt.probes[k];
    *probes.back() << header.str() << "# probe " << fmt17(p.x) << ' ' << fmt17(p.y) << ' ' << fmt17(p.z)
                   << "\nt\tvalue\n";
  }
  RunObserver obs;
  obs.on_log = [&](const LogRow& row) {
    *energy << fmt17(row.t) << '\t' << fmt17(row.energy) << '\n';
    *norm << fmt17(row.t) << '\t' << fmt17(row.norm) << '\n';
    for (std::size_t k = 0; k < probes.size(); ++k) *probes[k] << fmt17(row.t) << '\t' << fmt17(row.probes[k]) << '\n';
    summary.t_final = row.t;
    summary.energy_final = row.energy;
    if (progress) *progress << "t = " << row.t << "  E_d = " << row.energy << '\n';
  };
  obs.on_snapshot = [&](double requested, double, const Vector& U) {
    auto os = open(snapshot_name(requested));
    *os << header.str();
    write_state(U, *os);
  };
  simulate(evo, mesh, opt, obs);
  summary.steps = evo.steps();
  for (auto* f : {energy.get(), norm.get()})
    if (!*f) throw std::runtime_error("write failed in " + out_dir);
  return summary;
}

inline KeyValueConfig run_config() { return KeyValueConfig(kRunKeys, kRunRepeatable); }

}  // namespace dodecawave
