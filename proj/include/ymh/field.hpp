#pragma once
// Field states on a twisted lattice bundle: a complex Higgs value u per site
// and a real (noncompact) connection component a_j per link, stored strictly
// periodically. All covariant operations route through the TwistRule tables,
// so seam transitions are invisible to callers.

#include <cmath>
#include <memory>
#include <optional>

#include "grid.hpp"
#include "reduce.hpp"
#include "rng.hpp"

namespace ymh {

struct TangentState {
  std::vector<cplx> du;   // per site
  std::vector<double> da; // axis-major: da[axis*nsites + site]

  static TangentState zeros(const Grid& g) {
    TangentState t;
    t.du.assign(g.nsites, cplx(0, 0));
    t.da.assign(int64_t(g.dim) * g.nsites, 0.0);
    return t;
  }
};

struct FieldState {
  Grid grid;
  BundleTwist twist;
  std::vector<cplx> u;    // per site
  std::vector<double> a;  // axis-major: a[axis*nsites + site]
  std::shared_ptr<const TwistRule> rule;

  double a_at(int axis, int64_t i) const { return a[int64_t(axis) * grid.nsites + i]; }
  double& a_at(int axis, int64_t i) { return a[int64_t(axis) * grid.nsites + i]; }

  // gamma_j(x) = h_j*a_j(x) + s_j(x); transport T_j(x) = exp(-i*gamma_j(x)).
  double link_phase(int axis, int64_t i) const {
    return grid.h[axis] * a_at(axis, i) + rule->link_shift(axis, i);
  }
  cplx transport(int axis, int64_t i) const {
    double g = link_phase(axis, i);
    return cplx(std::cos(g), -std::sin(g));
  }
  // Forward gauge-covariant difference D_j u(x) = (T_j(x) u(x+e_j) - u(x))/h_j.
  cplx covariant_difference(int axis, int64_t i) const {
    return (transport(axis, i) * u[rule->next(axis, i)] - u[i]) / grid.h[axis];
  }
  // Plaquette curvature F_{jk}(x), twist shift included.
  double plaquette_curvature(int plane, int64_t i) const {
    auto [j, k] = plane_axes(plane);
    int64_t ij = rule->next(j, i), ik = rule->next(k, i);
    return (a_at(k, ij) - a_at(k, i)) / grid.h[j] - (a_at(j, ik) - a_at(j, i)) / grid.h[k] +
           rule->plaq_shift(plane, i);
  }
};

// sum F_{jk} h_j h_k over the (j,k)-torus at a fixed transverse slice
// (dim 2: the whole grid, transverse arg ignored). Equals 2*pi*d_{jk} up to
// roundoff for any connection: the a-part telescopes, the seam shift is exact.
inline double total_flux(const FieldState& s, int plane, int transverse_slice = 0) {
  const Grid& g = s.grid;
  auto [j, k] = plane_axes(plane);
  KahanSum flux;
  if (g.dim == 2) {
    for (int64_t i = 0; i < g.nsites; ++i)
      flux.add(s.plaquette_curvature(plane, i) * g.h[j] * g.h[k]);
  } else {
    int m = 3 - j - k;  // transverse axis
    std::array<int, 3> x{0, 0, 0};
    x[m] = transverse_slice;
    for (int xj = 0; xj < g.n[j]; ++xj)
      for (int xk = 0; xk < g.n[k]; ++xk) {
        x[j] = xj;
        x[k] = xk;
        flux.add(s.plaquette_curvature(plane, g.index(x[0], x[1], x[2])) * g.h[j] * g.h[k]);
      }
  }
  return flux.value();
}

// u -> e^{i theta} u, a_j -> a_j + (theta(x+e_j) - theta(x))/h_j (periodic
// difference; the seam data is bundle structure and never changes). Energy
// and all gauge-invariant observables are exactly preserved.
inline void apply_gauge(FieldState& s, const std::vector<double>& theta) {
  const Grid& g = s.grid;
  if (int64_t(theta.size()) != g.nsites) throw std::invalid_argument("apply_gauge: size mismatch");
  parallel_for(g.nsites, [&](int64_t i) {
    s.u[i] *= cplx(std::cos(theta[i]), std::sin(theta[i]));
  });
  for (int j = 0; j < g.dim; ++j) {
    double inv_h = 1.0 / g.h[j];
    parallel_for(g.nsites, [&](int64_t i) {
      s.a_at(j, i) += (theta[s.rule->next(j, i)] - theta[i]) * inv_h;
    });
  }
}

struct InitSpec {
  enum class Kind { Constant, Random } kind = Kind::Constant;
  cplx value{1.0, 0.0};       // Constant
  std::uint64_t seed = 1;     // Random
  double amplitude = 0.1;     // Random
  static InitSpec constant(cplx c) { return {Kind::Constant, c, 0, 0}; }
  static InitSpec random(std::uint64_t seed, double amplitude = 0.1) {
    InitSpec s;
    s.kind = Kind::Random;
    s.seed = seed;
    s.amplitude = amplitude;
    return s;
  }
};

inline FieldState build_state(const Grid& g, const BundleTwist& tw, const InitSpec& init) {
  FieldState s;
  s.grid = g;
  s.twist = tw;
  s.rule = std::make_shared<TwistRule>(g, tw);
  s.u.assign(g.nsites, cplx(0, 0));
  s.a.assign(int64_t(g.dim) * g.nsites, 0.0);
  switch (init.kind) {
    case InitSpec::Kind::Constant:
      if (std::abs(init.value) != 0.0 && !tw.trivial())
        throw std::invalid_argument(
            "build_state: constant nonzero section is inconsistent with a nontrivial bundle "
            "(nonzero degree); use a profile or random init");
      std::fill(s.u.begin(), s.u.end(), init.value);
      break;
    case InitSpec::Kind::Random: {
      Rng rng(init.seed);
      for (int64_t i = 0; i < g.nsites; ++i)
        s.u[i] = init.amplitude * cplx(rng.symmetric(), rng.symmetric());
      for (int j = 0; j < g.dim; ++j)
        for (int64_t i = 0; i < g.nsites; ++i)
          s.a_at(j, i) = init.amplitude * rng.symmetric();
      break;
    }
  }
  return s;
}

// --- linear-space helpers used by solvers and tests ------------------------

inline void state_axpy(FieldState& s, double t, const TangentState& v) {
  const int64_t ns = s.grid.nsites;
  parallel_for(ns, [&](int64_t i) { s.u[i] += t * v.du[i]; });
  parallel_for(int64_t(s.grid.dim) * ns, [&](int64_t i) { s.a[i] += t * v.da[i]; });
}

inline void tangent_axpy(TangentState& y, double t, const TangentState& v) {
  parallel_for(int64_t(y.du.size()), [&](int64_t i) { y.du[i] += t * v.du[i]; });
  parallel_for(int64_t(y.da.size()), [&](int64_t i) { y.da[i] += t * v.da[i]; });
}

inline void tangent_scale(TangentState& y, double t) {
  parallel_for(int64_t(y.du.size()), [&](int64_t i) { y.du[i] *= t; });
  parallel_for(int64_t(y.da.size()), [&](int64_t i) { y.da[i] *= t; });
}

// L2 pairing with cell volume: <v,w> = sum Re(dv*conj(dw))*vol + sum da*da'*vol.
inline double tangent_dot(const Grid& g, const TangentState& v, const TangentState& w) {
  KahanSum k;
  for (size_t i = 0; i < v.du.size(); ++i)
    k.add(v.du[i].real() * w.du[i].real() + v.du[i].imag() * w.du[i].imag());
  for (size_t i = 0; i < v.da.size(); ++i) k.add(v.da[i] * w.da[i]);
  return k.value() * g.cell_vol;
}

inline double tangent_sup(const TangentState& v) {
  double m = 0;
  for (const cplx& z : v.du) m = std::max(m, std::abs(z));
  for (double x : v.da) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_u(const FieldState& s) {
  double m = 0;
  for (const cplx& z : s.u) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace ymh
