// Energy functional: value decomposition, analytic gradient against finite
// differences, density bookkeeping, and the stress-tensor trace identity.

#include <catch2/catch_amalgamated.hpp>

#include "ymh/ymh.hpp"

using namespace ymh;

namespace {

FieldState random_state(int dim, std::array<int, 3> n, std::array<int, 3> deg, uint64_t seed,
                        double amp = 0.8) {
  Grid g = Grid::make(dim, n, {1.0, 1.0, 1.0});
  InitSpec init;
  init.kind = InitSpec::Kind::Random;
  init.seed = seed;
  init.amplitude = amp;
  return build_state(g, BundleTwist::make(dim, deg), init);
}

TangentState random_tangent(const Grid& g, uint64_t seed, double amp = 1.0) {
  Rng rng(seed);
  TangentState v = TangentState::zeros(g);
  for (auto& z : v.du) z = amp * cplx(rng.symmetric(), rng.symmetric());
  for (auto& x : v.da) x = amp * rng.symmetric();
  return v;
}

}  // namespace

TEST_CASE("potential density has the expected pointwise values") {
  CHECK(potential_W(cplx(0, 0)) == Catch::Approx(0.25).margin(1e-15));
  CHECK(potential_W(cplx(1, 0)) == Catch::Approx(0.0).margin(1e-15));
  CHECK(potential_W(cplx(0, 1)) == Catch::Approx(0.0).margin(1e-15));
  CHECK(potential_W(cplx(0.6, 0.8)) == Catch::Approx(0.0).margin(1e-15));
  CHECK(potential_W(cplx(2, 0)) == Catch::Approx(9.0 / 4).margin(1e-12));
}

TEST_CASE("energy parts are nonnegative and sum to the total") {
  FieldState s = random_state(2, {24, 24, 1}, {1, 0, 0}, 5);
  EnergyBreakdown eb = energy(s, 0.2);
  CHECK(eb.dirichlet >= 0.0);
  CHECK(eb.maxwell >= 0.0);
  CHECK(eb.potential >= 0.0);
  CHECK(eb.total ==
        Catch::Approx(eb.dirichlet + eb.maxwell + eb.potential).epsilon(1e-14));
}

TEST_CASE("energy density integrates to the total energy") {
  for (int dim : {2, 3}) {
    FieldState s = dim == 2 ? random_state(2, {20, 28, 1}, {2, 0, 0}, 11)
                            : random_state(3, {10, 12, 8}, {1, -1, 2}, 12);
    double eps = 0.25;
    std::vector<double> e = energy_density(s, eps);
    KahanSum total;
    for (double v : e) total.add(v * s.grid.cell_vol);
    CHECK(total.value() == Catch::Approx(energy(s, eps).total).epsilon(1e-12));
  }
}

// Directional derivative from the analytic gradient against a central
// difference of the energy along 20 random (state, direction) pairs. The
// quadratic-plus-quartic structure makes 1e-6 relative agreement at step
// 1e-6 a comfortable target for an exact gradient (observed ~1e-8).
TEST_CASE("analytic gradient matches central finite differences") {
  const double step = 1e-6;
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    FieldState s = random_state(2, {32, 32, 1}, {1, 0, 0}, 100 + trial, 0.7);
    double eps = 0.1 + 0.01 * trial;
    TangentState grad = TangentState::zeros(s.grid);
    energy_and_gradient(s, eps, grad);
    TangentState v = random_tangent(s.grid, 900 + trial);
    double predicted = tangent_dot(s.grid, grad, v);

    FieldState sp = s, sm = s;
    state_axpy(sp, step, v);
    state_axpy(sm, -step, v);
    double measured = (energy(sp, eps).total - energy(sm, eps).total) / (2 * step);
    double rel = std::fabs(predicted - measured) / std::max(1.0, std::fabs(measured));
    worst = std::max(worst, rel);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("gradient and plain energy report identical values") {
  FieldState s = random_state(3, {8, 10, 12}, {1, 0, -1}, 3);
  double eps = 0.3;
  TangentState grad = TangentState::zeros(s.grid);
  EnergyBreakdown a = energy_and_gradient(s, eps, grad);
  EnergyBreakdown b = energy(s, eps);
  CHECK(a.total == Catch::Approx(b.total).epsilon(1e-14));
  CHECK(a.dirichlet == Catch::Approx(b.dirichlet).epsilon(1e-14));
  CHECK(a.maxwell == Catch::Approx(b.maxwell).epsilon(1e-14));
  CHECK(a.potential == Catch::Approx(b.potential).epsilon(1e-14));
}

// The integrated trace of the stress tensor obeys
//   sum tr(T) vol = dim*E - 2*Dirichlet - 4*Maxwell
// exactly (including the site-averaging of link/plaquette quantities),
// because each derivative term enters tr(T) with weight (dim - 2) for
// gradient-type terms and (dim - 4) for curvature-type terms.
TEST_CASE("stress tensor trace satisfies the integral identity") {
  for (int dim : {2, 3}) {
    FieldState s = dim == 2 ? random_state(2, {24, 20, 1}, {1, 0, 0}, 21)
                            : random_state(3, {12, 10, 8}, {2, 1, 0}, 22);
    double eps = 0.2;
    EnergyBreakdown eb = energy(s, eps);
    TensorField T = stress_energy(s, eps);
    KahanSum tr;
    for (int64_t i = 0; i < s.grid.nsites; ++i)
      for (int j = 0; j < dim; ++j) tr.add(T.at(i, j, j) * s.grid.cell_vol);
    double expected = dim * eb.total - 2.0 * eb.dirichlet - 4.0 * eb.maxwell;
    CHECK(tr.value() == Catch::Approx(expected).epsilon(1e-10).margin(1e-10));
  }
}

TEST_CASE("curvature discrepancy is near zero on a relaxed vortex") {
  Grid g = Grid::make(2, {32, 32, 1}, {1, 1, 1});
  double eps = 0.15;
  FieldState seed = seed_from_profile(g, BundleTwist::make(2, {1, 0, 0}), eps, {{0.5, 0.5}}, {1});
  SolverOptions opt;
  opt.tol = 1e-5;
  SolveResult r = minimize(seed, eps, opt);
  REQUIRE(r.converged);
  std::vector<double> xi = discrepancy(r.state, eps);
  double mx = *std::max_element(xi.begin(), xi.end());
  // On a relaxed configuration the curvature nearly balances the potential
  // term; on the raw random data above it is orders of magnitude larger.
  CHECK(mx <= 1.0);
  CHECK(mx >= -1.0);
}
