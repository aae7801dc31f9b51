// dodecawave command-line front end. Exit codes: 0 success, 2 usage error, 1 runtime error.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "dodecawave/assembly.hpp"
#include "dodecawave/config.hpp"
#include "dodecawave/horizon.hpp"
#include "dodecawave/run.hpp"
#include "dodecawave/selftest.hpp"
#include "dodecawave/sky.hpp"
#include "dodecawave/spectral.hpp"

using namespace dodecawave;

namespace {

void apply_overrides(KeyValueConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
}

// Keys shared by the subcommands that need a field on a mesh.
std::set<std::string> field_keys(std::set<std::string> extra) {
  extra.insert({"level", "mesh", "state", "init", "constant", "bump_count", "seed"});
  return extra;
}

Vector field_from_config(const KeyValueConfig& cfg, const TetMeshP2& mesh) {
  if (cfg.has("state")) {
    if (cfg.has("init")) throw UsageError("give either 'state' or 'init', not both");
    return read_state(cfg.get("state"), mesh.n_classes());
  }
  return initial_data_from_config(cfg, mesh).u0;
}

int cmd_mesh(int level, const std::string& out) {
  TetMeshP2 m = build_mesh(level);
  write_mesh(m, out);
  std::cout << "level " << m.level << ": " << m.n_vertices() << " vertices, " << m.tets.size() << " tets, "
            << m.n_nodes() << " P2 nodes, " << m.n_classes() << " classes (kind 2: " << count_kind(m, NodeKind::domain_vertex)
            << ", kind 3: " << count_kind(m, NodeKind::face) << ", kind 4: " << count_kind(m, NodeKind::edge) << ")\n"
            << "h_max " << m.max_edge_length() << ", written to " << out << '\n';
  return 0;
}

int cmd_run(const std::string& path, const std::vector<std::string>& sets, bool quiet) {
  KeyValueConfig cfg = run_config();
  cfg.parse_file(path);
  apply_overrides(cfg, sets);
  RunSummary s = run_from_config(cfg, quiet ? nullptr : &std::cout);
  std::cout << s.steps << " levels, final t = " << fmt17(s.t_final) << ", E_d = " << fmt17(s.energy_final) << '\n';
  for (const auto& f : s.files) std::cout << "wrote " << f << '\n';
  return 0;
}

int cmd_modes(const std::string& model_name, double H, int beta_max, double u0, double du0,
              std::optional<std::uint64_t> seed, double t0, const std::string& out) {
  ScaleFactorModel model = model_name == "desitter"    ? ScaleFactorModel::de_sitter(H)
                           : model_name == "inflating" ? ScaleFactorModel::inflating()
                                                       : throw UsageError("model must be desitter or inflating");
  if (beta_max < 1) throw UsageError("beta-max must be at least 1");
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw std::runtime_error("cannot open " + out + " for writing");
  }
  std::ostream& os = out.empty() ? std::cout : file;
  std::mt19937_64 rng(seed.value_or(0));
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  os << "beta\tq2\tu0\tdu0\tA_plus\tA_minus\tu_inf\trk4_max_dev\n";
  for (auto l : eigen_betas(beta_max)) {
    double a = u0, b = du0;
    if (seed) {
      a = U(rng);
      b = U(rng);
    }
    auto A = coeffs_from_data(model, l, a, b, t0);
    double dt = model.kind == ModelKind::de_sitter ? 2e-4 / model.H : 2e-4 / (1.0 + l.beta / 20.0);
    double dev = 0;
    for (const auto& s : mode_ode_rk4(model, l, a, b, t0, t0 + 10.0, dt, 25))
      dev = std::max(dev, std::fabs(s.u - mode_closed(model, l, A, s.t).u));
    os << l.beta << '\t' << fmt17(l.q2()) << '\t' << fmt17(a) << '\t' << fmt17(b) << '\t' << fmt17(A.plus) << '\t'
       << fmt17(A.minus + 0.0) << '\t' << fmt17(asymptotic_profile(model, l, A)) << '\t' << fmt17(dev) << '\n';
  }
  return 0;
}

int cmd_horizon(const std::string& model_name, double H, std::optional<double> t_star, std::optional<double> R,
                std::optional<double> t, std::optional<double> t_ls, std::optional<double> t_obs) {
  ScaleFactorModel model = model_name == "desitter"    ? ScaleFactorModel::de_sitter(H)
                           : model_name == "inflating" ? ScaleFactorModel::inflating()
                                                       : throw UsageError("model must be desitter or inflating");
  char buf[64];
  if (t_ls || t_obs) {
    if (!t_ls || !t_obs) throw UsageError("circles query needs both --t-ls and --t-obs");
    auto c = circles_condition(model, *t_ls, *t_obs);
    std::snprintf(buf, sizeof buf, "%.4f", c.radius);
    std::cout << "horizon sphere radius " << buf << " (" << fmt17(c.radius) << "), conformal distance "
              << fmt17(c.distance) << ", d_max " << fmt17(d_max()) << "\nmultiple images: "
              << (c.multiple_images ? "yes" : "no") << '\n';
    return 0;
  }
  if (!t_star || !R) throw UsageError("horizon query needs --t-star and --R (or --t-ls and --t-obs)");
  if (!(*R >= 0 && *R < r_max())) throw UsageError("R must lie in [0, R_max)");
  auto r = t ? comoving_radius(model, *t_star, *R, *t) : horizon_radius(model, *t_star, *R);
  std::snprintf(buf, sizeof buf, "%.4f", r.value);
  std::cout << (t ? "R(t) " : "R_h ") << buf << " (" << fmt17(r.value) << ")" << (r.wrapped ? " wrapped" : "")
            << (r.value > r_max() ? ", exceeds R_max" : "") << '\n';
  return 0;
}

int cmd_sky(const std::string& path, const std::vector<std::string>& sets) {
  KeyValueConfig cfg(field_keys({"n_theta", "n_phi", "output", "circle_samples"}), {"bump", "chi"});
  cfg.parse_file(path);
  apply_overrides(cfg, sets);
  TetMeshP2 mesh = mesh_from_config(cfg);
  Vector U = field_from_config(cfg, mesh);
  const std::string out = cfg.get("output");
  std::filesystem::create_directories(out);
  if (cfg.all("chi").empty()) throw UsageError("missing key 'chi'");
  SkySampler sampler(mesh, U);
  for (const auto& text : cfg.all("chi")) {
    double chi = KeyValueConfig::to_double("chi", text);
    auto map = sky_map(sampler, chi, static_cast<int>(cfg.integer("n_theta", 512)),
                       static_cast<int>(cfg.integer("n_phi", 1024)));
    auto stem = (std::filesystem::path(out) / sky_stem(chi)).string();
    write_file(stem + ".tsv", [&](std::ostream& os) { write_sky_tsv(map, os); });
    write_file(stem + ".pgm", [&](std::ostream& os) { write_sky_pgm(map, os); }, true);
    auto res = circle_residual(sampler, map, static_cast<int>(cfg.integer("circle_samples", 360)));
    std::cout << "chi " << fmt17(chi) << ": range [" << fmt17(map.min()) << ", " << fmt17(map.max()) << "], "
              << res.pairs << " matched circle pairs, mean residual " << fmt17(res.mean_abs_diff) << " ("
              << fmt17(100 * res.relative) << "% of range)\nwrote " << stem << ".tsv, " << stem << ".pgm\n";
  }
  return 0;
}

int cmd_tiling(const std::string& path, const std::vector<std::string>& sets) {
  KeyValueConfig cfg(field_keys({"cells", "output"}), {"bump"});
  cfg.parse_file(path);
  apply_overrides(cfg, sets);
  TetMeshP2 mesh = mesh_from_config(cfg);
  Vector U = field_from_config(cfg, mesh);
  std::vector<int> cells;
  const std::string cells_arg = cfg.get("cells", "neighbors");
  if (cells_arg == "neighbors") {
    cells = neighbor_cells();
  } else if (cells_arg == "all") {
    for (int k = 0; k < 120; ++k) cells.push_back(k);
  } else {
    std::istringstream in(cells_arg);
    std::string tok;
    while (in >> tok) cells.push_back(static_cast<int>(KeyValueConfig::to_long("cells", tok)));
  }
  const std::string out = cfg.get("output");
  write_file(out, [&](std::ostream& os) { tiling_export(mesh, U, cells, os); });
  std::cout << cells.size() << " cells, " << mesh.n_vertices() << " vertices each, written to " << out << '\n';
  return 0;
}

int cmd_selftest(const std::vector<int>& ids) {
  AcceptanceSuite suite;
  int failures = suite.run_all(std::cout, ids);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scalar waves on the Poincare dodecahedral space"};
  app.require_subcommand(1);

  auto* mesh = app.add_subcommand("mesh", "Build a classified P2 mesh of the fundamental domain");
  int level = 0;
  std::string mesh_out;
  mesh->add_option("--level", level, "Refinement level 0..5")->required();
  mesh->add_option("--out", mesh_out, "Output mesh file")->required();

  auto* run = app.add_subcommand("run", "Evolve initial data described by a key=value config");
  std::string run_cfg;
  std::vector<std::string> run_sets;
  bool quiet = false;
  run->add_option("config", run_cfg, "Run config file")->required();
  run->add_option("--set", run_sets, "Override a config key (key=value)");
  run->add_flag("--quiet", quiet, "Do not echo log rows");

  auto* modes = app.add_subcommand("modes", "Tabulate closed-form mode coefficients and limits");
  std::string modes_model = "desitter", modes_out;
  double modes_H = 1.0, u0 = 1.0, du0 = 0.0, t0 = 0.0;
  int beta_max = 61;
  std::optional<std::uint64_t> modes_seed;
  modes->add_option("--model", modes_model, "desitter or inflating");
  modes->add_option("--H", modes_H, "Hubble constant (de Sitter)");
  modes->add_option("--beta-max", beta_max, "Largest beta");
  modes->add_option("--u0", u0, "Mode value at t0 (all modes)");
  modes->add_option("--du0", du0, "Mode velocity at t0 (all modes)");
  modes->add_option("--seed", modes_seed, "Random data in [-1,1] per mode instead of --u0/--du0");
  modes->add_option("--t0", t0, "Time of the data");
  modes->add_option("--out", modes_out, "Output TSV (default stdout)");

  auto* horizon = app.add_subcommand("horizon", "Causal radii and the circles-in-the-sky condition");
  std::string hz_model = "inflating";
  double hz_H = 1.0;
  std::optional<double> hz_tstar, hz_R, hz_t, hz_tls, hz_tobs;
  horizon->add_option("--model", hz_model, "desitter or inflating");
  horizon->add_option("--H", hz_H, "Hubble constant (de Sitter)");
  horizon->add_option("--t-star", hz_tstar, "Start time of the data");
  horizon->add_option("--R", hz_R, "Initial support radius");
  horizon->add_option("--t", hz_t, "Finite time for R(t); horizon radius when omitted");
  horizon->add_option("--t-ls", hz_tls, "Last-scattering time");
  horizon->add_option("--t-obs", hz_tobs, "Observation time");

  auto* sky = app.add_subcommand("sky", "Sky maps on spheres of radius chi");
  std::string sky_cfg;
  std::vector<std::string> sky_sets;
  sky->add_option("config", sky_cfg, "Sky config file")->required();
  sky->add_option("--set", sky_sets, "Override a config key (key=value)");

  auto* tiling = app.add_subcommand("tiling", "Pull a field back to cells of the universal cover");
  std::string tiling_cfg;
  std::vector<std::string> tiling_sets;
  tiling->add_option("config", tiling_cfg, "Tiling config file")->required();
  tiling->add_option("--set", tiling_sets, "Override a config key (key=value)");

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
  std::vector<int> ids;
  selftest->add_option("criteria", ids, "Criterion numbers (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*mesh) return cmd_mesh(level, mesh_out);
    if (*run) return cmd_run(run_cfg, run_sets, quiet);
    if (*modes) return cmd_modes(modes_model, modes_H, beta_max, u0, du0, modes_seed, t0, modes_out);
    if (*horizon) return cmd_horizon(hz_model, hz_H, hz_tstar, hz_R, hz_t, hz_tls, hz_tobs);
    if (*sky) return cmd_sky(sky_cfg, sky_sets);
    if (*tiling) return cmd_tiling(tiling_cfg, tiling_sets);
    if (*selftest) return cmd_selftest(ids);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
