// State diagnostics: winding extraction, periodic geometry, distance
// transform, ball-energy monotonicity bookkeeping, tail-decay fit, energy
// concentration and per-slice quantization.

#include <catch2/catch_amalgamated.hpp>

#include "ymh/ymh.hpp"

using namespace ymh;

namespace {

// Relaxed single vortex on a 48^2 torus; shared by several tests.
const SolveResult& relaxed_vortex() {
  static SolveResult r = [] {
    Grid g = Grid::make(2, {48, 48, 1}, {1, 1, 1});
    FieldState seed =
        seed_from_profile(g, BundleTwist::make(2, {1, 0, 0}), 0.1, {{0.5, 0.5}}, {1});
    SolverOptions opt;
    opt.tol = 1e-6;
    return minimize(seed, 0.1, opt);
  }();
  return r;
}

}  // namespace

TEST_CASE("periodic squared distance honors wrap-around") {
  Grid g = Grid::make(2, {16, 16, 1}, {1.0, 2.0, 1.0});
  CHECK(periodic_dist2(g, {0.1, 0.0, 0}, {0.9, 0.0, 0}) == Catch::Approx(0.04).margin(1e-12));
  CHECK(periodic_dist2(g, {0.0, 0.1, 0}, {0.0, 1.9, 0}) == Catch::Approx(0.04).margin(1e-12));
  CHECK(periodic_dist2(g, {0.2, 0.3, 0}, {0.2, 0.3, 0}) == Catch::Approx(0.0).margin(1e-15));
  CHECK(periodic_dist2(g, {0.0, 0.0, 0}, {0.5, 1.0, 0}) ==
        Catch::Approx(0.25 + 1.0).margin(1e-12));
}

TEST_CASE("distance transform needs a nonempty source set") {
  Grid g = Grid::make(2, {16, 16, 1}, {1, 1, 1});
  TwistRule R(g, BundleTwist::make(2, {0, 0, 0}));
  std::vector<char> empty(g.nsites, 0);
  CHECK_THROWS_AS(distance_to_set(g, R, empty), std::runtime_error);
}

TEST_CASE("distance transform approximates periodic euclidean distance") {
  Grid g = Grid::make(2, {32, 32, 1}, {1, 1, 1});
  TwistRule R(g, BundleTwist::make(2, {0, 0, 0}));
  std::vector<char> src(g.nsites, 0);
  int64_t origin = g.index(0, 0);
  src[origin] = 1;
  std::vector<double> dist = distance_to_set(g, R, src);
  CHECK(dist[origin] == 0.0);
  for (int64_t i = 0; i < g.nsites; ++i) {
    double exact = std::sqrt(periodic_dist2(g, g.position(i), {0, 0, 0}));
    CHECK(dist[i] >= exact - 1e-12);       // graph paths cannot beat straight lines
    CHECK(dist[i] <= 1.1 * exact + 1e-9);  // 8-neighbor metric overhead is < 8.3%
  }
}

TEST_CASE("winding extraction flags integer charges at vortex cores") {
  const SolveResult& r = relaxed_vortex();
  REQUIRE(r.converged);
  VortexSet vs = extract_vortices(r.state);
  REQUIRE(vs.plaquettes.size() == 1);
  CHECK(vs.plaquettes[0].charge == 1);
  CHECK(vs.plane_total[0] == 1);
  double d = std::sqrt(periodic_dist2(r.state.grid, vs.plaquettes[0].center, {0.5, 0.5, 0}));
  CHECK(d <= 2.0 * r.state.grid.max_h());
}

TEST_CASE("ball energy profile bookkeeping is consistent") {
  const SolveResult& r = relaxed_vortex();
  std::vector<double> radii = {0.1, 0.15, 0.2, 0.25, 0.3};
  MonotonicityProfile mp = monotonicity_profile(r.state, 0.1, {0.5, 0.5, 0}, radii);
  REQUIRE(mp.radii == radii);
  REQUIRE(mp.density.size() == radii.size());
  // In two dimensions the profile is the raw ball energy, which increases
  // with the radius; no adjacent pair may be flagged.
  for (size_t i = 1; i < mp.density.size(); ++i) CHECK(mp.density[i] >= mp.density[i - 1] - 1e-12);
  CHECK(mp.violations.empty());
  // The largest ball nearly exhausts the total energy of a tight vortex.
  CHECK(mp.density.back() <= r.energy.total + 1e-12);
  CHECK(mp.density.back() >= 0.8 * r.energy.total);

  CHECK_THROWS_AS(monotonicity_profile(r.state, 0.1, {0.5, 0.5, 0}, {0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(monotonicity_profile(r.state, 0.1, {0.5, 0.5, 0}, {0.2, 0.1}),
                  std::invalid_argument);
}

TEST_CASE("violation detection fires on artificially decreasing profiles") {
  // A state with two well-separated equal vortices: the ball around one core
  // gains no energy between the first core's closure and the second core's
  // entry, so with a strong exponential weight e^{cm r} the profile must
  // register a decrease when tol is zero.
  Grid g = Grid::make(2, {64, 64, 1}, {1, 1, 1});
  double eps = 0.07;
  FieldState s = seed_from_profile(g, BundleTwist::make(2, {2, 0, 0}), eps,
                                   {{0.25, 0.25}, {0.75, 0.75}}, {1, 1});
  MonotonicityProfile mp =
      monotonicity_profile(s, eps, {0.25, 0.25, 0}, {0.2, 0.25, 0.3}, -8.0, 0.0);
  CHECK_FALSE(mp.violations.empty());
}

TEST_CASE("tail decay of a relaxed vortex is exponential at the core scale") {
  // The automatic fit window spans [3 eps, 10 eps] in shells of width eps/2,
  // so the coupling must be small against the torus for ten shells to fit.
  Grid g = Grid::make(2, {64, 64, 1}, {1, 1, 1});
  double eps = 0.0625;
  FieldState seed = seed_from_profile(g, BundleTwist::make(2, {1, 0, 0}), eps, {{0.5, 0.5}}, {1});
  SolverOptions opt;
  opt.tol = 1e-6;
  SolveResult r = minimize(seed, eps, opt);
  REQUIRE(r.converged);

  DecayFit fit = decay_fit(r.state, eps);
  // Fields relax to vacuum like exp(-r/eps), so the energy density falls
  // like exp(-2 r/eps); the fitted rate lands within a few percent of 2.
  CHECK(fit.rate >= 1.7);
  CHECK(fit.rate <= 2.3);
  CHECK(fit.log_rms <= 0.3);
  REQUIRE(fit.shell_r.size() >= 10);
  for (int64_t c : fit.shell_count) CHECK(c > 0);
  // A window narrower than ten shells must be rejected, as must a core
  // threshold that no site clears.
  CHECK_THROWS_AS(decay_fit(r.state, eps, 0.5, 0.2, 0.25), std::runtime_error);
  CHECK_THROWS_AS(decay_fit(r.state, eps, 1.0 + 1e-9), std::runtime_error);
}

TEST_CASE("energy of a relaxed vortex concentrates near the core") {
  const SolveResult& r = relaxed_vortex();
  VortexSet vs = extract_vortices(r.state);
  double frac = concentration_fraction(r.state, 0.1, vs, 10.0);
  CHECK(frac >= 0.9);
  CHECK(frac <= 1.0 + 1e-12);
  VortexSet none;
  CHECK_THROWS_AS(concentration_fraction(r.state, 0.1, none, 10.0), std::invalid_argument);
}

TEST_CASE("slice quantization reports near-integer multiples on an extruded state") {
  Grid g = Grid::make(3, {32, 32, 8}, {1, 1, 1});
  double eps = 0.15;
  FieldState s = seed_from_profile(g, BundleTwist::make(3, {1, 0, 0}), eps, {{0.5, 0.5}}, {1}, 2);
  SliceQuantization sq = slice_quantization(s, eps, 2);
  REQUIRE(sq.value.size() == size_t(g.n[2]));
  // Every slice of the extruded profile holds the same cutoff integral, and
  // it sits near 2*pi.
  for (double v : sq.value) CHECK(v == Catch::Approx(sq.value[0]).epsilon(1e-10));
  CHECK(sq.median <= 0.25 * TWO_PI);
  CHECK(sq.worst >= sq.median);

  Grid g2 = Grid::make(2, {16, 16, 1}, {1, 1, 1});
  InitSpec init;
  init.kind = InitSpec::Kind::Random;
  FieldState flat = build_state(g2, BundleTwist::make(2, {0, 0, 0}), init);
  CHECK_THROWS_AS(slice_quantization(flat, eps, 2), std::invalid_argument);
  CHECK_THROWS_AS(slice_quantization(s, eps, 5), std::invalid_argument);
}

TEST_CASE("line tracing follows a straight vortex through the volume") {
  Grid g = Grid::make(3, {24, 24, 12}, {1, 1, 1});
  double eps = 0.18;
  FieldState s = seed_from_profile(g, BundleTwist::make(3, {1, 0, 0}), eps, {{0.5, 0.5}}, {1}, 2);
  VortexSet vs = extract_vortices(s);
  REQUIRE(vs.lines.size() == 1);
  CHECK_FALSE(vs.tangled);
  const auto& line = vs.lines[0];
  REQUIRE(line.vertices.size() == size_t(g.n[2]));
  for (const auto& v : line.vertices) {
    double d = std::sqrt(periodic_dist2(g, {v[0], v[1], 0}, {0.5, 0.5, 0}));
    CHECK(d <= 2.0 * g.max_h());
  }
}
