#pragma once
// Gauge fixing on the torus. Two pure normalizations:
//
//  * coulomb_project: gauge transform by the zero-mean solution of
//    Laplacian(theta) = div(a), after which the discrete divergence
//    sum_j (a_j(x) - a_j(x-e_j))/h_j vanishes at stencil level. Idempotent,
//    exactly energy-preserving (it is a gauge transform).
//
//  * harmonic_reduce: removes the integer part of the harmonic (constant)
//    component of a. The per-direction mean m_j is moved to the nearest
//    element 2 pi k_j / L_j of the lattice of large gauge transformations;
//    ties at exactly pi/L_j round toward 0. The compensating phase
//    exp(-i 2 pi k_j x_j / L_j) is a single-valued periodic function, so this
//    too is an exact symmetry of the energy. Seam transitions are bundle
//    structure and carry no harmonic ambiguity: only the stored (interior)
//    link values enter the means.

#include "energy.hpp"
#include "fft.hpp"

namespace ymh {

inline std::vector<double> divergence(const FieldState& s) {
  const Grid& g = s.grid;
  std::vector<double> div(g.nsites, 0.0);
  for (int j = 0; j < g.dim; ++j) {
    const double inv_h = 1.0 / g.h[j];
    parallel_for(g.nsites, [&](int64_t i) {
      div[i] += (s.a_at(j, i) - s.a_at(j, s.rule->prev(j, i))) * inv_h;
    });
  }
  return div;
}

inline void coulomb_project(FieldState& s, Spectral& sp) {
  if (!sp.grid().same_shape(s.grid)) throw std::invalid_argument("coulomb_project: grid mismatch");
  std::vector<double> theta = sp.poisson(divergence(s));
  for (double& t : theta) t = -t;
  apply_gauge(s, theta);
}

inline void coulomb_project(FieldState& s) {
  Spectral sp(s.grid);
  coulomb_project(s, sp);
}

// Nearest integer with half-way cases rounded toward zero.
inline long round_half_toward_zero(double t) {
  double fl = std::floor(t), fr = t - fl;
  if (fr > 0.5) return long(fl) + 1;
  if (fr < 0.5) return long(fl);
  return t > 0 ? long(fl) : long(fl) + 1;  // |t - k| tie: pick smaller |k|
}

inline void harmonic_reduce(FieldState& s) {
  const Grid& g = s.grid;
  std::array<long, 3> kk{0, 0, 0};
  for (int j = 0; j < g.dim; ++j) {
    KahanSum m;
    for (int64_t i = 0; i < g.nsites; ++i) m.add(s.a_at(j, i));
    double mean = m.value() / double(g.nsites);
    kk[j] = round_half_toward_zero(mean * g.len[j] / TWO_PI);
  }
  if (kk[0] == 0 && kk[1] == 0 && kk[2] == 0) return;
  for (int j = 0; j < g.dim; ++j) {
    if (kk[j] == 0) continue;
    const double lam = TWO_PI * double(kk[j]) / g.len[j];
    parallel_for(g.nsites, [&](int64_t i) { s.a_at(j, i) -= lam; });
  }
  parallel_for(g.nsites, [&](int64_t i) {
    auto x = g.coords(i);
    double phase = 0;
    for (int j = 0; j < g.dim; ++j)
      phase -= TWO_PI * double(kk[j]) * double(x[j]) / double(g.n[j]);
    s.u[i] *= cplx(std::cos(phase), std::sin(phase));
  });
}

}  // namespace ymh
