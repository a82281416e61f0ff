// Gauge structure: invariance of every observable under random gauge
// transformations, and the normalization passes (divergence-free projection,
// harmonic-winding removal).

#include <catch2/catch_amalgamated.hpp>

#include "ymh/ymh.hpp"

using namespace ymh;

namespace {

FieldState vortex_seed_32() {
  Grid g = Grid::make(2, {32, 32, 1}, {1, 1, 1});
  return seed_from_profile(g, BundleTwist::make(2, {1, 0, 0}), 0.15, {{0.5, 0.5}}, {1});
}

std::vector<double> random_angles(const Grid& g, uint64_t seed, double amp) {
  Rng rng(seed);
  std::vector<double> th(g.nsites);
  for (auto& t : th) t = amp * rng.symmetric();
  return th;
}

double max_vec(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

TEST_CASE("gauge transformation rejects mismatched angle arrays") {
  FieldState s = vortex_seed_32();
  std::vector<double> theta(s.grid.nsites - 1, 0.0);
  CHECK_THROWS_AS(apply_gauge(s, theta), std::invalid_argument);
}

TEST_CASE("observables are invariant under random gauge transformations") {
  const double eps = 0.15;
  FieldState s = vortex_seed_32();
  EnergyBreakdown e0 = energy(s, eps);
  double flux0 = total_flux(s, 0);
  double maxu0 = max_abs_u(s);
  double xi0 = max_vec(discrepancy(s, eps));
  VortexSet v0 = extract_vortices(s);
  TangentState g0 = TangentState::zeros(s.grid);
  energy_and_gradient(s, eps, g0);
  double sup0 = tangent_sup(g0);

  FieldState t = s;
  apply_gauge(t, random_angles(s.grid, 99, 3.0));
  EnergyBreakdown e1 = energy(t, eps);
  CHECK(e1.total == Catch::Approx(e0.total).epsilon(1e-10));
  CHECK(e1.dirichlet == Catch::Approx(e0.dirichlet).epsilon(1e-10));
  CHECK(e1.maxwell == Catch::Approx(e0.maxwell).epsilon(1e-10));
  CHECK(e1.potential == Catch::Approx(e0.potential).epsilon(1e-10));
  CHECK(total_flux(t, 0) == Catch::Approx(flux0).margin(1e-10));
  CHECK(max_abs_u(t) == Catch::Approx(maxu0).epsilon(1e-12));
  CHECK(max_vec(discrepancy(t, eps)) == Catch::Approx(xi0).epsilon(1e-10).margin(1e-12));

  // Plaquette windings are integers and must agree one by one.
  VortexSet v1 = extract_vortices(t);
  REQUIRE(v1.plaquettes.size() == v0.plaquettes.size());
  for (size_t i = 0; i < v0.plaquettes.size(); ++i) {
    CHECK(v1.plaquettes[i].site == v0.plaquettes[i].site);
    CHECK(v1.plaquettes[i].charge == v0.plaquettes[i].charge);
  }

  // |grad_u| rotates with the section and grad_a is untouched, so the sup
  // norm of the gradient is gauge-invariant as well.
  TangentState g1 = TangentState::zeros(t.grid);
  energy_and_gradient(t, eps, g1);
  CHECK(tangent_sup(g1) == Catch::Approx(sup0).epsilon(1e-10));
}

TEST_CASE("divergence-free projection is idempotent and energy preserving") {
  const double eps = 0.15;
  FieldState s = vortex_seed_32();
  apply_gauge(s, random_angles(s.grid, 41, 2.0));  // leave Coulomb gauge on purpose
  double e0 = energy(s, eps).total;

  coulomb_project(s);
  CHECK(energy(s, eps).total == Catch::Approx(e0).epsilon(1e-10));
  double div1 = 0;
  for (double d : divergence(s)) div1 = std::max(div1, std::fabs(d));
  CHECK(div1 <= 1e-9);

  // A second projection must be a no-op.
  FieldState s2 = s;
  coulomb_project(s2);
  double da = 0, du = 0;
  for (int64_t i = 0; i < s.grid.nsites; ++i) {
    du = std::max(du, std::abs(s2.u[i] - s.u[i]));
    for (int j = 0; j < s.grid.dim; ++j)
      da = std::max(da, std::fabs(s2.a_at(j, i) - s.a_at(j, i)));
  }
  CHECK(da <= 1e-10);
  CHECK(du <= 1e-10);
  CHECK(energy(s2, eps).total == Catch::Approx(e0).epsilon(1e-10));
}

TEST_CASE("harmonic winding removal recenters the connection average") {
  const double eps = 0.15;
  FieldState s = vortex_seed_32();
  const Grid& g = s.grid;
  double e0 = energy(s, eps).total;

  // Apply a large-winding gauge transformation by hand: shift a_0 by a
  // harmonic representative and wind the section to compensate. This is an
  // exact symmetry of the energy but leaves a huge connection average.
  const long k = 3;
  const double lam = TWO_PI * double(k) / g.len[0];
  FieldState t = s;
  for (int64_t i = 0; i < g.nsites; ++i) {
    t.a_at(0, i) += lam;
    double phase = TWO_PI * double(k) * double(g.coords(i)[0]) / double(g.n[0]);
    t.u[i] *= cplx(std::cos(phase), std::sin(phase));
  }
  CHECK(energy(t, eps).total == Catch::Approx(e0).epsilon(1e-10));

  harmonic_reduce(t);
  CHECK(energy(t, eps).total == Catch::Approx(e0).epsilon(1e-10));
  for (int j = 0; j < g.dim; ++j) {
    KahanSum m;
    for (int64_t i = 0; i < g.nsites; ++i) m.add(t.a_at(j, i));
    double mean = m.value() / double(g.nsites);
    CHECK(std::fabs(mean) <= PI / g.len[j] + 1e-9);
  }
}
