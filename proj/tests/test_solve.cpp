// Minimization and critical-point search: convergence, descent traces,
// coupling sweeps, and the finite symmetry-group machinery used to pin
// non-minimizing critical points.

#include <catch2/catch_amalgamated.hpp>

#include "ymh/ymh.hpp"

using namespace ymh;

namespace {

FieldState checkerboard_seed(int n, double eps) {
  Grid g = Grid::make(2, {n, n, 1}, {1, 1, 1});
  return seed_from_profile(g, BundleTwist::make(2, {0, 0, 0}), eps,
                           {{0.25, 0.25}, {0.75, 0.75}, {0.75, 0.25}, {0.25, 0.75}},
                           {1, 1, -1, -1});
}

SymmetrySpec checkerboard_group(int n) {
  // Klein four-group: half-period translations composed with conjugation
  // and/or a global sign flip; fixes all four defect positions.
  SymmetrySpec sym;
  sym.elements.push_back({});                                  // identity
  sym.elements.push_back({{n / 2, 0, 0}, true, false});
  sym.elements.push_back({{0, n / 2, 0}, true, true});
  sym.elements.push_back({{n / 2, n / 2, 0}, false, true});
  return sym;
}

}  // namespace

TEST_CASE("single vortex minimization converges to the quantized energy") {
  Grid g = Grid::make(2, {32, 32, 1}, {1, 1, 1});
  double eps = 0.15;
  FieldState seed = seed_from_profile(g, BundleTwist::make(2, {1, 0, 0}), eps, {{0.5, 0.5}}, {1});
  SolverOptions opt;
  opt.tol = 1e-6;
  opt.trace = true;
  SolveResult r = minimize(seed, eps, opt);
  REQUIRE(r.converged);
  CHECK(r.grad_sup <= 1e-6);
  CHECK(r.energy.total / TWO_PI == Catch::Approx(1.0).margin(0.05));
  CHECK(max_abs_u(r.state) <= 1.0 + 10.0 * g.max_h() * g.max_h());
  CHECK(total_flux(r.state, 0) / TWO_PI == Catch::Approx(1.0).margin(1e-10));

  // Line-searched descent must never increase the energy along the trace.
  REQUIRE(r.trace.size() >= 2);
  for (size_t i = 1; i < r.trace.size(); ++i)
    CHECK(r.trace[i].energy <= r.trace[i - 1].energy + 1e-12);

  // The returned state is already gauge-normalized: projecting again must
  // change nothing measurable.
  FieldState t = r.state;
  coulomb_project(t);
  CHECK(energy(t, eps).total == Catch::Approx(r.energy.total).epsilon(1e-12));
  double da = 0;
  for (size_t i = 0; i < t.a.size(); ++i) da = std::max(da, std::fabs(t.a[i] - r.state.a[i]));
  CHECK(da <= 1e-8);
}

TEST_CASE("coupling sweep validates its schedule") {
  Grid g = Grid::make(2, {32, 32, 1}, {1, 1, 1});
  FieldState seed = seed_from_profile(g, BundleTwist::make(2, {1, 0, 0}), 0.2, {{0.5, 0.5}}, {1});
  CHECK_THROWS_AS(epsilon_sweep(seed, {}), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_sweep(seed, {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_sweep(seed, {0.2, 0.2}), std::invalid_argument);
  // 1/32 > 0.1/4: the last coupling is unresolvable on this grid.
  CHECK_THROWS_AS(epsilon_sweep(seed, {0.2, 0.1}), std::invalid_argument);
}

TEST_CASE("coupling sweep relaxes through decreasing couplings") {
  Grid g = Grid::make(2, {48, 48, 1}, {1, 1, 1});
  FieldState seed = seed_from_profile(g, BundleTwist::make(2, {1, 0, 0}), 0.2, {{0.5, 0.5}}, {1});
  SolverOptions opt;
  opt.tol = 1e-5;
  SweepResult sw = epsilon_sweep(seed, {0.2, 0.12}, opt);
  CHECK(sw.all_converged);
  REQUIRE(sw.rows.size() == 2);
  for (const auto& row : sw.rows) {
    CHECK(row.converged);
    CHECK(row.energy.total / TWO_PI == Catch::Approx(1.0).margin(0.05));
    CHECK(row.max_u <= 1.0 + 10.0 * g.max_h() * g.max_h());
    CHECK(std::isfinite(row.max_xi));
    CHECK(row.max_xi <= 1.0);
  }
  CHECK(sw.rows[0].eps == 0.2);
  CHECK(sw.rows[1].eps == 0.12);
}

TEST_CASE("symmetry elements act as exact energy symmetries") {
  const int n = 64;
  const double eps = 0.08;
  FieldState s = checkerboard_seed(n, eps);
  SymmetrySpec sym = checkerboard_group(n);
  double e0 = energy(s, eps).total;
  for (const auto& el : sym.elements)
    CHECK(energy(apply_symmetry(s, el), eps).total == Catch::Approx(e0).epsilon(1e-10));
  CHECK_NOTHROW(check_symmetry_invariance(s, eps, sym));

  // Conjugation flips the sign of the flux, which nothing on a degree +1
  // bundle can undo: the transformed state has a different energy and the
  // guard must fire.
  Grid gv = Grid::make(2, {32, 32, 1}, {1, 1, 1});
  FieldState vx =
      seed_from_profile(gv, BundleTwist::make(2, {1, 0, 0}), 0.15, {{0.5, 0.5}}, {1});
  SymmetrySpec bad;
  bad.elements.push_back({});
  bad.elements.push_back({{0, 0, 0}, true, false});
  CHECK_THROWS_AS(check_symmetry_invariance(vx, 0.15, bad), std::invalid_argument);
}

TEST_CASE("group averaging fixes symmetric states and is idempotent") {
  const int n = 64;
  const double eps = 0.08;
  FieldState s = checkerboard_seed(n, eps);
  SymmetrySpec sym = checkerboard_group(n);
  align_global_phase(s, sym);
  symmetrize_state(s, sym);
  double e1 = energy(s, eps).total;

  FieldState s2 = s;
  symmetrize_state(s2, sym);
  double du = 0, da = 0;
  for (int64_t i = 0; i < s.grid.nsites; ++i) du = std::max(du, std::abs(s2.u[i] - s.u[i]));
  for (size_t i = 0; i < s.a.size(); ++i) da = std::max(da, std::fabs(s2.a[i] - s.a[i]));
  CHECK(du <= 1e-12);
  CHECK(da <= 1e-12);
  CHECK(energy(s2, eps).total == Catch::Approx(e1).epsilon(1e-12));

  // Averaging a state that is symmetric only up to a constant phase must be
  // preceded by phase alignment; with it, the energy stays put.
  FieldState rot = checkerboard_seed(n, eps);
  for (auto& z : rot.u) z *= cplx(std::cos(0.3), std::sin(0.3));
  double e_rot = energy(rot, eps).total;
  align_global_phase(rot, sym);
  symmetrize_state(rot, sym);
  CHECK(energy(rot, eps).total == Catch::Approx(e_rot).epsilon(1e-8));
}

TEST_CASE("tangent projection commutes with symmetric gradients") {
  const int n = 64;
  const double eps = 0.08;
  FieldState s = checkerboard_seed(n, eps);
  SymmetrySpec sym = checkerboard_group(n);
  align_global_phase(s, sym);
  symmetrize_state(s, sym);

  TangentState grad = TangentState::zeros(s.grid);
  energy_and_gradient(s, eps, grad);
  TangentState proj = grad;
  project_tangent(s.grid, proj, sym);

  // The gradient of a symmetric state is itself symmetric, so projection
  // changes nothing; and projecting twice equals projecting once.
  double du = 0, da = 0;
  for (int64_t i = 0; i < s.grid.nsites; ++i) du = std::max(du, std::abs(proj.du[i] - grad.du[i]));
  for (size_t i = 0; i < grad.da.size(); ++i)
    da = std::max(da, std::fabs(proj.da[i] - grad.da[i]));
  CHECK(du <= 1e-9);
  CHECK(da <= 1e-9);

  TangentState proj2 = proj;
  project_tangent(s.grid, proj2, sym);
  du = 0;
  for (int64_t i = 0; i < s.grid.nsites; ++i)
    du = std::max(du, std::abs(proj2.du[i] - proj.du[i]));
  CHECK(du <= 1e-12);
}

TEST_CASE("constrained search pins a balanced defect configuration") {
  const int n = 64;
  const double eps = 0.08;
  FieldState seed = checkerboard_seed(n, eps);
  SymmetrySpec sym = checkerboard_group(n);
  SolverOptions opt;
  opt.tol = 1e-6;
  CriticalResult cr = find_critical(seed, eps, sym, opt, 20000);
  REQUIRE(cr.converged);
  CHECK(cr.grad_sup <= 1e-6);
  CHECK_FALSE(cr.trivial_minimum);
  // Four pinned defects cost strictly more than vacuum; the measured value
  // sits near 2*pi*3.9 at this coupling.
  CHECK(cr.energy.total / TWO_PI >= 3.0);
  VortexSet vs = extract_vortices(cr.state);
  CHECK(vs.plane_total[0] == 0);
  REQUIRE(vs.plaquettes.size() == 4);
}

TEST_CASE("unconstrained search from a near-vacuum start finds the vacuum") {
  Grid g = Grid::make(2, {16, 16, 1}, {1, 1, 1});
  InitSpec init;
  init.kind = InitSpec::Kind::Random;
  init.seed = 4;
  init.amplitude = 0.05;
  FieldState s = build_state(g, BundleTwist::make(2, {0, 0, 0}), init);
  for (auto& z : s.u) z += 1.0;  // small fluctuation around the constant section
  CriticalResult cr = find_critical(s, 0.3, {}, {}, 2000);
  REQUIRE(cr.converged);
  CHECK(cr.trivial_minimum);
  CHECK(cr.energy.total <= 1e-6);
}
