#pragma once
// Stress-energy tensor, inner-variation (stationarity) residual, and the
// gauge-invariant vorticity current J.
//
//   T = e g - 2 (Du x Du) - 2 eps^2 (w x w)
//     (Du x Du)_{ij} = <D_i u, D_j u>,  (w x w)_{ij} = sum_k w_{ik} w_{jk}
//
//   J_{jk} = 2 <i D_j u, D_k u> + (1 - |u|^2) F_{jk}
//
// Every ingredient is averaged to sites/plaquette centers with the same
// adjacent-cell averages used by energy_density, so trace identities hold to
// roundoff: tr T = dim*e - 2|Du|^2 - 4 eps^2 |F|^2 pointwise.

#include <functional>

#include "energy.hpp"

namespace ymh {

struct TensorField {
  int dim = 2;
  int64_t nsites = 0;
  std::vector<double> comp;  // packed upper triangle, site-minor

  int ncomp() const { return dim * (dim + 1) / 2; }
  static int pack(int dim, int r, int c) {
    if (r > c) std::swap(r, c);
    return r * dim - r * (r - 1) / 2 + (c - r);
  }
  double at(int64_t i, int r, int c) const { return comp[i * ncomp() + pack(dim, r, c)]; }
  double& at(int64_t i, int r, int c) { return comp[i * ncomp() + pack(dim, r, c)]; }
};

inline TensorField stress_energy(const FieldState& s, double eps) {
  const Grid& g = s.grid;
  const TwistRule& R = *s.rule;
  const int dim = g.dim;
  const double eps2 = eps * eps;

  std::vector<double> e = energy_density(s, eps);
  std::vector<double> F = plaquette_curvature_field(s);
  std::vector<double> Fbar = site_curvature_components(s);

  TensorField T;
  T.dim = dim;
  T.nsites = g.nsites;
  T.comp.assign(g.nsites * T.ncomp(), 0.0);

  parallel_for(g.nsites, [&](int64_t i) {
    // Site-averaged covariant derivatives (complex mean of adjacent links)
    // and scalar averages of |D_j u|^2 for the diagonal.
    cplx Dbar[3];
    double D2[3] = {0, 0, 0};
    for (int j = 0; j < dim; ++j) {
      cplx d0 = s.covariant_difference(j, R.prev(j, i));
      cplx d1 = s.covariant_difference(j, i);
      Dbar[j] = 0.5 * (d0 + d1);
      D2[j] = 0.5 * (std::norm(d0) + std::norm(d1));
    }
    double FF[3][3] = {};  // avg of F_{jk}^2 over the 4 adjacent plaquettes
    for (int p = 0; p < plane_count(dim); ++p) {
      auto [j, k] = plane_axes(p);
      const double* f = F.data() + int64_t(p) * g.nsites;
      int64_t pj = R.prev(j, i), pk = R.prev(k, i), pjk = R.prev(k, pj);
      double v = 0.25 * (f[i] * f[i] + f[pj] * f[pj] + f[pk] * f[pk] + f[pjk] * f[pjk]);
      FF[j][k] = FF[k][j] = v;
    }
    for (int r = 0; r < dim; ++r)
      for (int c = r; c < dim; ++c) {
        double v = (r == c) ? e[i] : 0.0;
        double grad2 = (r == c) ? D2[r]
                                : (Dbar[r].real() * Dbar[c].real() +
                                   Dbar[r].imag() * Dbar[c].imag());
        v -= 2.0 * grad2;
        double ww = 0;
        if (r == c) {
          for (int k2 = 0; k2 < dim; ++k2)
            if (k2 != r) ww += FF[r][k2];
        } else if (dim == 3) {
          int k2 = 3 - r - c;  // the third axis
          auto wcomp = [&](int a1, int a2) {  // w_{a1 a2} from site-averaged F
            if (a1 < a2) return Fbar[int64_t(plane_of(a1, a2)) * g.nsites + i];
            return -Fbar[int64_t(plane_of(a2, a1)) * g.nsites + i];
          };
          ww = wcomp(r, k2) * wcomp(c, k2);
        }
        v -= 2.0 * eps2 * ww;
        T.at(i, r, c) = v;
      }
  });
  return T;
}

// |sum <T, DX> vol| / (sup|DX| * E_total) for an analytic vector field X
// sampled at sites; DX by centered differences. Near zero at critical points
// (the discrete form of "integral stationarity under inner variations").
inline double inner_variation_residual(
    const FieldState& s, double eps,
    const std::function<std::array<double, 3>(const std::array<double, 3>&)>& X) {
  const Grid& g = s.grid;
  const TwistRule& R = *s.rule;
  const int dim = g.dim;
  TensorField T = stress_energy(s, eps);
  double etot = energy(s, eps).total;

  std::vector<double> Xs(int64_t(dim) * g.nsites);
  for (int64_t i = 0; i < g.nsites; ++i) {
    auto v = X(g.position(i));
    for (int c = 0; c < dim; ++c) Xs[int64_t(c) * g.nsites + i] = v[c];
  }

  KahanSum pairing;
  double sup_dx = 0;
  for (int64_t i = 0; i < g.nsites; ++i) {
    double frob2 = 0, dot = 0;
    for (int r = 0; r < dim; ++r) {
      double inv2h = 0.5 / g.h[r];
      for (int c = 0; c < dim; ++c) {
        const double* col = Xs.data() + int64_t(c) * g.nsites;
        double dx = (col[R.next(r, i)] - col[R.prev(r, i)]) * inv2h;
        frob2 += dx * dx;
        dot += T.at(i, r, c) * dx;
      }
    }
    pairing.add(dot);
    sup_dx = std::max(sup_dx, std::sqrt(frob2));
  }
  double denom = sup_dx * etot;
  if (denom == 0) throw std::invalid_argument("inner_variation_residual: degenerate X or state");
  return std::fabs(pairing.value() * g.cell_vol) / denom;
}

// J_{jk} per plaquette (plane-major layout, like plaquette_curvature_field).
// Written as J = F + curl(Gamma) with the link-native one-form
// Gamma_k(x) = Im(conj(u(x)) T_k(x) u(x+e_k)) / h_k = <i u, D_k u> + O(h^2)
// at the link midpoint; expanding gives the usual
// J = (1 - |u|^2) F + 2 <i D_j u, D_k u> up to O(h^2). In this form the
// curl part telescopes over any 2-torus of plaquettes, so the plane sum of
// J h_j h_k equals the total flux 2 pi d exactly, for every state.
inline std::vector<double> current_J(const FieldState& s) {
  const Grid& g = s.grid;
  const TwistRule& R = *s.rule;
  const int np = plane_count(g.dim);

  std::vector<double> gam(int64_t(g.dim) * g.nsites);
  for (int k = 0; k < g.dim; ++k) {
    double* row = gam.data() + int64_t(k) * g.nsites;
    parallel_for(g.nsites, [&](int64_t i) {
      row[i] = std::imag(std::conj(s.u[i]) * s.transport(k, i) * s.u[R.next(k, i)]) / g.h[k];
    });
  }

  std::vector<double> J(int64_t(np) * g.nsites);
  for (int p = 0; p < np; ++p) {
    auto [j, k] = plane_axes(p);
    const double* gj = gam.data() + int64_t(j) * g.nsites;
    const double* gk = gam.data() + int64_t(k) * g.nsites;
    double* row = J.data() + int64_t(p) * g.nsites;
    parallel_for(g.nsites, [&](int64_t i) {
      int64_t ij = R.next(j, i), ik = R.next(k, i);
      row[i] = s.plaquette_curvature(p, i) + (gk[ij] - gk[i]) / g.h[j] - (gj[ik] - gj[i]) / g.h[k];
    });
  }
  return J;
}

// Two-form norm of J averaged to sites (same 4-plaquette signed average as
// the curvature); pointwise |J| <= e_eps up to discretization.
inline std::vector<double> site_current_norm(const FieldState& s, const std::vector<double>& J) {
  const Grid& g = s.grid;
  const TwistRule& R = *s.rule;
  const int np = plane_count(g.dim);
  std::vector<double> out(g.nsites);
  parallel_for(g.nsites, [&](int64_t i) {
    double n2 = 0;
    for (int p = 0; p < np; ++p) {
      auto [j, k] = plane_axes(p);
      const double* row = J.data() + int64_t(p) * g.nsites;
      int64_t pj = R.prev(j, i), pk = R.prev(k, i), pjk = R.prev(k, pj);
      double c = 0.25 * (row[i] + row[pj] + row[pk] + row[pjk]);
      n2 += c * c;
    }
    out[i] = std::sqrt(n2);
  });
  return out;
}

inline double current_mass(const FieldState& s, const std::vector<double>& J) {
  std::vector<double> n = site_current_norm(s, J);
  KahanSum m;
  for (double v : n) m.add(v);
  return m.value() * s.grid.cell_vol;
}

// sum J_{jk} h_j h_k over the (j,k)-torus at a fixed transverse slice
// (dim 2: whole grid). Equals the total flux 2 pi d exactly: the curl part
// of J telescopes and the flux sum is exact for any connection.
inline double j_plane_sum(const FieldState& s, const std::vector<double>& J, int plane,
                          int transverse_slice = 0) {
  const Grid& g = s.grid;
  auto [j, k] = plane_axes(plane);
  const double* row = J.data() + int64_t(plane) * g.nsites;
  KahanSum sum;
  if (g.dim == 2) {
    for (int64_t i = 0; i < g.nsites; ++i) sum.add(row[i] * g.h[j] * g.h[k]);
  } else {
    int m = 3 - j - k;
    std::array<int, 3> x{0, 0, 0};
    x[m] = transverse_slice;
    for (int xj = 0; xj < g.n[j]; ++xj)
      for (int xk = 0; xk < g.n[k]; ++xk) {
        x[j] = xj;
        x[k] = xk;
        sum.add(row[g.index(x[0], x[1], x[2])] * g.h[j] * g.h[k]);
      }
  }
  return sum.value();
}

}  // namespace ymh
