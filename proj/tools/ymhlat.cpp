// Command-line front end: minimize / sweep / saddle drive the solver from an
// INI config; oracle solves the radial profile ODEs; diagnose re-analyzes a
// saved state dump. Exit codes: 0 success, 1 usage/config/runtime error,
// 2 solver finished without reaching the gradient tolerance.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include <ymh/ymh.hpp>

namespace fs = std::filesystem;
using namespace ymh;

namespace {

struct GlobalOpts {
  std::string out_dir;  // overrides [output] dir when nonempty
  int threads = 1;
  long long seed = -1;  // overrides [init] seed when >= 0
};

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

void apply_overrides(SimConfig& cfg, const GlobalOpts& g) {
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (g.seed >= 0) cfg.seed = std::uint64_t(g.seed);
}

void write_common(const SimConfig& cfg, const FieldState& st, double eps, json j) {
  VortexSet vs = extract_vortices(st);
  j["vortices"] = vortices_json(vs);
  write_json(out_path(cfg.out_dir, "report.json"), j);
  write_vortices_csv(out_path(cfg.out_dir, "vortices.csv"), vs);
  if (st.grid.dim == 3) write_lines_csv(out_path(cfg.out_dir, "lines.csv"), vs);
  if (cfg.write_state) save_state(out_path(cfg.out_dir, "state.dump"), st, eps);
  if (cfg.write_density)
    save_scalar(out_path(cfg.out_dir, "density.dump"), st.grid, "energy_density",
                energy_density(st, eps));
}

int cmd_minimize(const std::string& config_path, const GlobalOpts& g) {
  SimConfig cfg = parse_config(config_path);
  apply_overrides(cfg, g);
  if (!(cfg.epsilon > 0))
    throw std::invalid_argument("config [physics] epsilon: required by minimize");
  FieldState init = config_initial_state(cfg, cfg.epsilon);
  SolveResult r = minimize(init, cfg.epsilon, cfg.solver);
  write_energy_csv(out_path(cfg.out_dir, "energy.csv"), {{cfg.epsilon, r.energy}});
  if (cfg.solver.trace) write_trace_csv(out_path(cfg.out_dir, "trace.csv"), r.trace);
  write_common(cfg, r.state, cfg.epsilon, solve_json(r, cfg.epsilon));
  std::cout << "energy " << r.energy.total << "  grad_sup " << r.grad_sup << "  iters " << r.iters
            << (r.converged ? "  converged" : "  NOT converged") << "\n";
  return r.converged ? 0 : 2;
}

int cmd_sweep(const std::string& config_path, const GlobalOpts& g) {
  SimConfig cfg = parse_config(config_path);
  apply_overrides(cfg, g);
  if (cfg.sweep.empty()) throw std::invalid_argument("config [physics] sweep: required by sweep");
  FieldState init = config_initial_state(cfg, cfg.sweep.front());
  SweepResult sw = epsilon_sweep(init, cfg.sweep, cfg.solver);
  write_sweep_csv(out_path(cfg.out_dir, "sweep.csv"), sw);
  double eps_last = cfg.sweep.back();
  json j = state_json(sw.state, eps_last);
  j["sweep_all_converged"] = sw.all_converged;
  write_common(cfg, sw.state, eps_last, std::move(j));
  for (const auto& row : sw.rows)
    std::cout << "eps " << row.eps << "  energy " << row.energy.total << "  iters " << row.iters
              << (row.converged ? "" : "  NOT converged") << "\n";
  return sw.all_converged ? 0 : 2;
}

int cmd_saddle(const std::string& config_path, const GlobalOpts& g) {
  SimConfig cfg = parse_config(config_path);
  apply_overrides(cfg, g);
  if (!(cfg.epsilon > 0))
    throw std::invalid_argument("config [physics] epsilon: required by saddle");
  FieldState init = config_initial_state(cfg, cfg.epsilon);
  CriticalResult r = find_critical(init, cfg.epsilon, cfg.symmetry, cfg.solver, cfg.phase1_iters,
                                   cfg.fd_step, cfg.trivial_threshold);
  json j = state_json(r.state, cfg.epsilon);
  j["critical"] = {{"converged", r.converged},
                   {"grad_sup", r.grad_sup},
                   {"phase1_iters", r.phase1_iters},
                   {"phase2_iters", r.phase2_iters},
                   {"trivial_minimum", r.trivial_minimum}};
  write_common(cfg, r.state, cfg.epsilon, std::move(j));
  std::cout << "energy " << r.energy.total << "  grad_sup " << r.grad_sup << "  "
            << (r.trivial_minimum ? "trivial minimum" : "nontrivial critical point")
            << (r.converged ? "" : "  NOT converged") << "\n";
  return r.converged ? 0 : 2;
}

int cmd_oracle(int N, double rmax, int mesh) {
  RadialProfile p = solve_bps(N, rmax, mesh);
  json j{{"N", N},
         {"rmax", rmax},
         {"energy", profile_energy(p)},
         {"energy_over_2piN", profile_energy(p) / (TWO_PI * N)},
         {"max_residual", p.max_residual()},
         {"core_slope", p.core_slope()},
         {"tail_slope", p.tail_slope()}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct DiagnoseOpts {
  std::string dump_path;
  double epsilon = -1;
  bool vortices = false, decay = false, monotonicity = false, slices = false, current = false,
       all = false;
  std::vector<double> center, radii;
  double cm = 0, beta = 0.5, conc_k = 10, chi_radius = -1;
  int slice_axis = 2;
};

int cmd_diagnose(const DiagnoseOpts& d, const GlobalOpts& g) {
  LoadedState ls = load_state(d.dump_path);
  const FieldState& s = ls.state;
  const Grid& grid = s.grid;
  double eps = d.epsilon > 0 ? d.epsilon : ls.eps;
  if (!(eps > 0)) throw std::invalid_argument("diagnose: no coupling stored; pass --epsilon");
  std::string dir = g.out_dir.empty() ? "." : g.out_dir;

  json j = state_json(s, eps);
  VortexSet vs = extract_vortices(s);
  if (d.all || d.vortices) {
    j["vortices"] = vortices_json(vs);
    write_vortices_csv(out_path(dir, "vortices.csv"), vs);
    if (grid.dim == 3) write_lines_csv(out_path(dir, "lines.csv"), vs);
  }
  if (d.all || d.decay) {
    DecayFit fit = decay_fit(s, eps, d.beta);
    j["decay"] = {{"rate", fit.rate},
                  {"log_rms", fit.log_rms},
                  {"r_lo", fit.r_lo},
                  {"r_hi", fit.r_hi},
                  {"concentration", concentration_fraction(s, eps, vs, d.conc_k)}};
    write_decay_csv(out_path(dir, "decay.csv"), fit);
  }
  if (d.all || d.monotonicity) {
    std::array<double, 3> center{0, 0, 0};
    if (!d.center.empty()) {
      if (int(d.center.size()) != grid.dim)
        throw std::invalid_argument("diagnose: --center needs one value per axis");
      for (int k = 0; k < grid.dim; ++k) center[k] = d.center[k];
    } else if (!vs.plaquettes.empty()) {
      center = vs.plaquettes.front().center;
    } else {
      throw std::invalid_argument("diagnose: no vortices found; pass --center");
    }
    std::vector<double> radii = d.radii;
    if (radii.empty()) {
      double rmin = 3 * eps, rmax = 0.45 * grid.len[0];
      for (int k = 1; k < grid.dim; ++k) rmax = std::min(rmax, 0.45 * grid.len[k]);
      if (!(rmax > rmin)) throw std::invalid_argument("diagnose: domain too small for default radii");
      for (int i = 0; i < 12; ++i) radii.push_back(rmin + (rmax - rmin) * i / 11.0);
    }
    MonotonicityProfile m = monotonicity_profile(s, eps, center, radii, d.cm);
    j["monotonicity"] = {{"violations", m.violations.size()},
                         {"density_first", m.density.front()},
                         {"density_last", m.density.back()}};
    write_monotonicity_csv(out_path(dir, "monotonicity.csv"), m);
  }
  if ((d.all && grid.dim == 3) || d.slices) {
    SliceQuantization sq = slice_quantization(s, eps, d.slice_axis, d.chi_radius, &vs);
    j["slices"] = {{"median_distance", sq.median},
                   {"worst_distance", sq.worst},
                   {"chi_radius", sq.chi_radius}};
    write_slices_csv(out_path(dir, "slices.csv"), sq);
  }
  if (d.all || d.current) {
    std::vector<double> J = current_J(s);
    json sums = json::array();
    for (int p = 0; p < plane_count(grid.dim); ++p)
      sums.push_back(j_plane_sum(s, J, p) / TWO_PI);
    j["current"] = {{"plane_sum_over_2pi", sums}, {"mass", current_mass(s, J)}};
  }
  write_json(out_path(dir, "report.json"), j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_roundtrip(const std::string& path) {
  LoadedState ls = load_state(path);
  std::string tmp = path + ".rt";
  save_state(tmp, ls.state, ls.eps);
  std::ifstream a(path, std::ios::binary), b(tmp, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  fs::remove(tmp);
  if (sa != sb) {
    std::cout << "round trip differs\n";
    return 1;
  }
  std::cout << "round trip identical (" << sa.size() << " bytes)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice gauged Ginzburg-Landau tool: minimizers, saddles, diagnostics"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--out", g.out_dir, "Output directory (overrides [output] dir)");
  app.add_option("--threads", g.threads, "Worker threads for element-wise maps");
  app.add_option("--seed", g.seed, "Override [init] seed");

  std::string config_path, dump_path;
  auto* c_min = app.add_subcommand("minimize", "Minimize the energy at a single coupling");
  c_min->add_option("config", config_path, "INI config")->required();
  auto* c_sweep = app.add_subcommand("sweep", "Warm-started continuation over decreasing couplings");
  c_sweep->add_option("config", config_path, "INI config")->required();
  auto* c_saddle = app.add_subcommand("saddle", "Symmetry-constrained critical point search");
  c_saddle->add_option("config", config_path, "INI config")->required();

  int oracle_n = 1, oracle_mesh = 0;
  double oracle_rmax = 24.0;
  auto* c_oracle = app.add_subcommand("oracle", "Radial vortex profile (independent ODE solve)");
  c_oracle->add_option("--N", oracle_n, "Winding number (>= 1)")->required();
  c_oracle->add_option("--rmax", oracle_rmax, "Domain radius");
  c_oracle->add_option("--mesh", oracle_mesh, "Collocation points (0 = auto)");

  DiagnoseOpts d;
  auto* c_diag = app.add_subcommand("diagnose", "Analyze a saved state dump");
  c_diag->add_option("dump", d.dump_path, "State dump")->required();
  c_diag->add_option("--epsilon", d.epsilon, "Override the stored coupling");
  c_diag->add_flag("--all", d.all, "Run every diagnostic");
  c_diag->add_flag("--vortices", d.vortices);
  c_diag->add_flag("--decay", d.decay);
  c_diag->add_flag("--monotonicity", d.monotonicity);
  c_diag->add_flag("--slices", d.slices);
  c_diag->add_flag("--current", d.current);
  c_diag->add_option("--center", d.center, "Ball center for monotonicity")->delimiter(',');
  c_diag->add_option("--radii", d.radii, "Monotonicity radii")->delimiter(',');
  c_diag->add_option("--cm", d.cm, "Monotonicity drift constant");
  c_diag->add_option("--beta", d.beta, "Core threshold: |u|^2 <= 1 - beta");
  c_diag->add_option("--concentration-k", d.conc_k, "Neighborhood radius in units of eps");
  c_diag->add_option("--chi-radius", d.chi_radius, "Slice cutoff radius");
  c_diag->add_option("--slice-axis", d.slice_axis, "Axis for slice quantization");

  auto* c_rt = app.add_subcommand("dump-roundtrip", "Verify a dump re-saves byte-identically");
  c_rt->add_option("dump", dump_path, "State dump")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    set_thread_count(g.threads);
    if (c_min->parsed()) return cmd_minimize(config_path, g);
    if (c_sweep->parsed()) return cmd_sweep(config_path, g);
    if (c_saddle->parsed()) return cmd_saddle(config_path, g);
    if (c_oracle->parsed())
      return cmd_oracle(oracle_n, oracle_rmax,
                        oracle_mesh > 0 ? oracle_mesh : int(std::ceil(oracle_rmax * 100)));
    if (c_diag->parsed()) return cmd_diagnose(d, g);
    if (c_rt->parsed()) return cmd_roundtrip(dump_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
