// Lattice bookkeeping: grid construction, indexing, plane maps, twisted
// boundary rule, and exactness of the total flux for arbitrary connections.

#include <catch2/catch_amalgamated.hpp>

#include "ymh/ymh.hpp"

using namespace ymh;

TEST_CASE("grid construction validates its arguments") {
  CHECK_THROWS_AS(Grid::make(1, {16, 16, 1}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(4, {16, 16, 16}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(2, {4, 16, 1}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(2, {16, 16, 1}, {0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make(2, {16, 16, 1}, {1, -2, 1}), std::invalid_argument);
}

TEST_CASE("grid sizes, spacings and cell volume are consistent") {
  Grid g = Grid::make(2, {16, 24, 1}, {1.0, 3.0, 1.0});
  CHECK(g.nsites == 16 * 24);
  CHECK(g.h[0] == Catch::Approx(1.0 / 16).epsilon(1e-15));
  CHECK(g.h[1] == Catch::Approx(3.0 / 24).epsilon(1e-15));
  CHECK(g.cell_vol == Catch::Approx(g.h[0] * g.h[1]).epsilon(1e-15));
  CHECK(g.max_h() == Catch::Approx(0.125).epsilon(1e-15));

  Grid g3 = Grid::make(3, {8, 12, 16}, {1.0, 1.0, 2.0});
  CHECK(g3.nsites == 8 * 12 * 16);
  CHECK(g3.cell_vol == Catch::Approx(g3.h[0] * g3.h[1] * g3.h[2]).epsilon(1e-15));
}

TEST_CASE("site index and coordinates invert each other") {
  Grid g = Grid::make(3, {8, 10, 12}, {1, 1, 1});
  for (int64_t i = 0; i < g.nsites; ++i) {
    auto c = g.coords(i);
    CHECK(g.index(c[0], c[1], c[2]) == i);
    auto p = g.position(i);
    for (int j = 0; j < 3; ++j) {
      CHECK(p[j] >= 0.0);
      CHECK(p[j] < g.len[j]);
    }
  }
}

TEST_CASE("plane index maps are mutually consistent") {
  CHECK(plane_count(2) == 1);
  CHECK(plane_count(3) == 3);
  for (int p = 0; p < 3; ++p) {
    auto [j, k] = plane_axes(p);
    CHECK(j < k);
    CHECK(plane_of(j, k) == p);
  }
}

TEST_CASE("periodic wrap keeps differences in the symmetric window") {
  CHECK(wrap_delta(0.9, 1.0) == Catch::Approx(-0.1).margin(1e-15));
  CHECK(wrap_delta(-0.6, 1.0) == Catch::Approx(0.4).margin(1e-15));
  CHECK(wrap_delta(0.3, 1.0) == Catch::Approx(0.3).margin(1e-15));
  CHECK(std::fabs(wrap_delta(17.77, 2.5)) <= 1.25);
}

TEST_CASE("bundle degrees beyond the plane count are dropped") {
  BundleTwist t2 = BundleTwist::make(2, {3, 7, -4});
  CHECK(t2.d[0] == 3);
  CHECK(t2.d[1] == 0);
  CHECK(t2.d[2] == 0);
  CHECK(BundleTwist::make(3, {1, -2, 5}).d == std::array<int, 3>{1, -2, 5});
  CHECK(BundleTwist::make(3, {1, -2, 5}).trivial() == false);
  CHECK(BundleTwist::make(3, {0, 0, 0}).trivial() == true);
}

TEST_CASE("neighbor tables are inverse permutations") {
  Grid g = Grid::make(3, {8, 8, 8}, {1, 1, 1});
  TwistRule R(g, BundleTwist::make(3, {2, -1, 3}));
  for (int j = 0; j < 3; ++j)
    for (int64_t i = 0; i < g.nsites; ++i) {
      CHECK(R.prev(j, R.next(j, i)) == i);
      CHECK(R.next(j, R.prev(j, i)) == i);
    }
}

TEST_CASE("link seam shifts live only on wrapping links") {
  Grid g = Grid::make(2, {12, 12, 1}, {1, 1, 1});
  TwistRule R(g, BundleTwist::make(2, {2, 0, 0}));
  for (int j = 0; j < 2; ++j)
    for (int64_t i = 0; i < g.nsites; ++i) {
      auto c = g.coords(i);
      if (c[j] != g.n[j] - 1) CHECK(R.link_shift(j, i) == 0.0);
    }
}

// The sum of plaquette curvatures times plaquette area over a full 2-torus
// must equal 2*pi*degree for ANY connection: the single-valued part
// telescopes to zero and only the seam contributes. This is the discrete
// Chern number and it is exact, not approximate.
TEST_CASE("total flux equals 2*pi*degree exactly for random connections") {
  Rng rng(7331);
  SECTION("two dimensions, several degrees") {
    for (int d : {-3, -1, 0, 1, 2, 5}) {
      Grid g = Grid::make(2, {16, 12, 1}, {1.0, 2.0, 1.0});
      InitSpec init;
      init.kind = InitSpec::Kind::Random;
      init.seed = 17 + d;
      init.amplitude = 1.0;
      FieldState s = build_state(g, BundleTwist::make(2, {d, 0, 0}), init);
      CHECK(total_flux(s, 0) / TWO_PI == Catch::Approx(double(d)).margin(1e-10));
    }
  }
  SECTION("three dimensions, every plane and slice") {
    Grid g = Grid::make(3, {10, 8, 12}, {1.0, 1.0, 1.5});
    InitSpec init;
    init.kind = InitSpec::Kind::Random;
    init.seed = 23;
    init.amplitude = 1.0;
    BundleTwist tw = BundleTwist::make(3, {2, -1, 3});
    FieldState s = build_state(g, tw, init);
    for (int p = 0; p < 3; ++p) {
      auto [j, k] = plane_axes(p);
      int m = 3 - j - k;
      for (int slice = 0; slice < g.n[m]; ++slice)
        CHECK(total_flux(s, p, slice) / TWO_PI == Catch::Approx(double(tw.d[p])).margin(1e-10));
    }
  }
}

TEST_CASE("constant nonzero section is rejected on a twisted bundle") {
  Grid g = Grid::make(2, {16, 16, 1}, {1, 1, 1});
  InitSpec init;
  init.kind = InitSpec::Kind::Constant;
  init.value = cplx(1.0, 0.0);
  CHECK_THROWS_AS(build_state(g, BundleTwist::make(2, {1, 0, 0}), init), std::invalid_argument);
  CHECK_NOTHROW(build_state(g, BundleTwist::make(2, {0, 0, 0}), init));
}
